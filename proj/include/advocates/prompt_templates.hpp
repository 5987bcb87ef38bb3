/*
 * Copyright 2026 The Advocates Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Generated by tools/embed_prompts.py from prompts/*.txt. Do not edit.

#pragma once

#include <string_view>

namespace advocates::templates {

inline constexpr std::string_view k_baseline_judge = R"tpl(
  You are a fair, impartial judge scoring a debate on the following question: {question}.
  Answer 1: {answer1}
  Answer 2: {answer2}
  Score each answer on a scale of 1-20 for each of the following criteria:
    1. Relevance to the question
    2. Accuracy of information and use of credible sources
    3. Depth of analysis and completeness of argument
    4. Clarity of expression and logical flow
    5. Strength of reasoning and factual support
    6. Effectiveness in addressing opponent's points
  Provide scores as [Answer1_score, Answer2_score] for each criterion in a list format, then sum for final scores. Please keep an eye on the slightest difference that should make a difference in the scoring. Don't overthink!
  Relevance:
  Accuracy:
  Depth:
  Clarity:
  Logic and Factuality:
  Addressing opponent's points:
  Final Scores (sum of above) as a tuple (example: (18, 9)):
  Explain your scoring, focusing on why one answer is better than the other based on the criteria above. Keep your explanation concise but informative.
  Finally, return the final score tuple (score1, score2) as a tuple (in parentheses). Example: (18, 9)
  Your scores and explanation:
)tpl";

inline constexpr std::string_view k_juror_vote = R"tpl(You are a juror in a debate. Your background: {persona}.
The debate was on the question: "{question}".
Answer 1: "{answer1}".
Answer 2: "{answer2}".
Debate transcript (advocate defenses, judge scores and feedback for every round):
{transcript}
Considering the advocates' arguments and the judge's feedback, decide which answer is better.
Cast your vote as a binary tuple (Score of Answer 1, Score of Answer 2): (1, 0) if Answer 1 is better, (0, 1) if Answer 2 is better.
Your vote:)tpl";

inline constexpr std::string_view k_more_advocate = R"tpl(You're a fierce advocate defending this answer: {answer} to the question: {question}. Your opponent defends: {opponent_answer}. Convince the audience your argument is superior by addressing these criteria:
1. Relevance
2. Accuracy
3. Depth
4. Clarity
5. Logic and Factuality

Be assertive and don't hold back! Use rhetoric and persuasion to win over the audience but be respectful.
Latest feedback: {feedback}
Opponent's last argument: {opponent_argument}

Your fierce defense (100 words max):)tpl";

inline constexpr std::string_view k_more_judge = R"tpl(You're a critical, impartial judge in a high-stakes debate on: "{question}".
Answer 1: "{answer1}". Answer 2: "{answer2}".
Your goal is to provide detailed, constructive feedback that will push advocates to significantly improve their arguments.
Current round: {current_round}
Max rounds: {max_rounds}
Previous scores: {previous_scores}

Defense for 1st answer: {defense1}
Defense for 2nd answer: {defense2}

Analyze each argument meticulously. Be thorough and unbiased in your assessment of:
1. Relevance to the question
2. Accuracy of information and use of credible sources
3. Depth of analysis and completeness of argument
4. Clarity of expression and logical flow
5. Strength of reasoning and factual support
6. Effectiveness in addressing opponent's points

For each criterion, provide a score on a scale of 1-20 and detailed justification.
Scores should be given as [Answer1_score, Answer2_score] for each criterion.

Your comprehensive feedback for each advocate (50 words each):
Feedback for Advocate 1:
Feedback for Advocate 2:

Sum up the scores and return the final score tuple (score1, score2). Example: (95, 87)
Your detailed scores and final tally:)tpl";

inline constexpr std::string_view k_samre_aggregate = R"tpl(You are an expert debate strategist. Your task is to aggregate and improve upon the following defenses for the answer: {answer} to the question: {question}. The opponent's answer is: {opponent_answer}.
Individual defenses: {defenses}
Latest feedback from the judge: {feedback}
Analyze each defense critically. Identify the strongest points, address any weaknesses, and combine the best arguments into a cohesive, powerful defense. Aim to create a defense that is stronger and more comprehensive than any individual argument.
Provide your aggregated and improved defense in under 150 words:)tpl";

inline constexpr std::string_view k_samre_defend = R"tpl(You're an eloquent advocate (Advocate {advocate_id}) in a group defending this answer: {answer} to the question: {question}. Your opponent group defends: {opponent_answer}. Collaborate with your fellow advocates to convince the audience your argument is better. Use the latest feedback, your opponent's last argument, and your team's previous arguments to improve your case.
Latest feedback: {feedback}
Opponent's last argument: {opponent_argument}
Your team's previous arguments: {team_arguments}
Respond in under 80 words.
Your defense:)tpl";

inline constexpr std::string_view k_samre_judge_feedback = R"tpl(You're a fair, impartial judge in a debate on: "{question}". Answer 1: "{answer1}". Answer 2: "{answer2}". Your goal is to provide feedback that will help advocate groups improve and differentiate their arguments more clearly.
Current round: {current_round}
Total rounds: {total_rounds}
Previous scores: {previous_scores}
Defense for 1st answer: {defense1}
Defense for 2nd answer: {defense2}
Provide specific, constructive feedback to help each advocate group strengthen their unique position. Encourage them to address weaknesses and highlight distinctions. Aim for your feedback to lead to more divergent scores in future rounds.
Give your feedback in under 50 words:)tpl";

inline constexpr std::string_view k_samre_score = R"tpl(You're a critical, impartial judge in a high-stakes debate on: "{question}". Answer 1: "{answer1}". Answer 2: "{answer2}". Your goal is to provide detailed, constructive feedback that will push advocates to significantly improve their arguments.
Total rounds: {total_rounds}
Previous scores: {previous_scores}
Defense for 1st answer: {defense1}
Defense for 2nd answer: {defense2}
Analyze each argument meticulously. Be thorough and unbiased in your assessment of:
1. Relevance to the question
2. Accuracy of information and use of credible sources
3. Depth of analysis and completeness of argument
4. Clarity of expression and logical flow
5. Strength of reasoning and factual support
6. Effectiveness in addressing opponent's points
For each criterion, provide a score on a scale of 1-20 and detailed justification. Scores should be given as [Answer1_score, Answer2_score] for each criterion.
Your comprehensive feedback for each advocate (50 words each):
Feedback for Advocate 1:
Feedback for Advocate 2:
Sum up the scores and return the final score tuple (score1, score2). Example: (95, 87)
Your detailed scores and final tally:)tpl";

inline constexpr std::string_view k_summarizer = R"tpl(Summarize the following content in 50 words or less, if there are any scores tuples, return them, it's important! Start summarization directly, no introductory sentences like here's your summary. In your summarization, only focus on the last scores, no partial ones. This is important: return the tuple of scores. These are the key points to summarize:{content})tpl";

}  // namespace advocates::templates
