#!/usr/bin/env python3
# Regenerates include/advocates/prompt_templates.hpp from prompts/*.txt.
import pathlib
import sys

root = pathlib.Path(__file__).resolve().parent.parent
header = (root / "LICENSE_HEADER.txt").read_text()
names = sorted(p.stem for p in (root / "prompts").glob("*.txt"))

out = [header, "// Generated by tools/embed_prompts.py from prompts/*.txt. Do not edit.\n",
       "#pragma once\n", "#include <string_view>\n", "namespace advocates::templates {\n"]
for name in names:
    body = (root / "prompts" / f"{name}.txt").read_text()
    if ")tpl\"" in body:
        sys.exit(f"{name}: body contains the raw-string delimiter")
    out.append(f'inline constexpr std::string_view k_{name} = R"tpl({body})tpl";\n')
out.append("}  // namespace advocates::templates\n")
(root / "include/advocates/prompt_templates.hpp").write_text("\n".join(out))
