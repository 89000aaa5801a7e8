"""Turning yes/no question-answer rows into declarative statements.

Scoring needs propositions, but QA datasets store questions.  The
converter handles the mechanical part for English questions that front
an auxiliary verb ("Is the street empty?").  Everything else is
rejected loudly rather than rewritten badly.
"""

from conqa import BinaryQA, NonBinaryAnswerError, UnsupportedQuestionError, qa_to_proposition

# The happy path: swap the first two tokens, drop the question mark.
# With a one-word subject that is exactly subject-auxiliary inversion
# undone, and a "no" answer adds "not" after the fronted verb.
rows = [
    ("Is it winter?", "yes"),
    ("Is it winter?", "no"),
    ("Does it rain a lot here?", "no"),
    ("Can dogs swim?", "yes"),
    ("Was everyone asleep?", "yes"),
    ("Have they finished?", "no"),
]
for question, answer in rows:
    statement = qa_to_proposition(BinaryQA(question, answer))
    print(f"{question!r:30s} + {answer:3s} -> {statement!r}")

# The swap is a literal token rule, not a parse.  Multi-word subjects
# therefore come out clunky, but deterministically so, and with the
# token multiset preserved, which is what downstream matching needs.
print()
clunky = qa_to_proposition(BinaryQA("Are the streets crowded?", "yes"))
print(f"literal swaps can be clunky: {clunky!r}")

# Rejections.  Each bad row raises a dedicated error at construction
# time, which is what lets a batch converter write an error sidecar
# instead of silently dropping rows.
print()
bad_rows = [
    ("What color is the horse?", "white"),
    ("The street is empty?", "yes"),
    ("Is the street empty", "yes"),
    ("Is the street empty?", "maybe"),
]
for question, answer in bad_rows:
    try:
        BinaryQA(question, answer)
    except UnsupportedQuestionError as err:
        print(f"{question!r:30s} + {answer!r}: unsupported question ({err})")
    except NonBinaryAnswerError as err:
        print(f"{question!r:30s} + {answer!r}: non-binary answer ({err})")

print(
    "\nThe command line front end (`python3 -m conqa.cli convert`) applies"
    "\nexactly these rules to a JSONL file and routes rejected rows to a"
    "\n.errors.jsonl sidecar with the error name per row."
)
