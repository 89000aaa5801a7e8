"""Rewrite auxiliary-fronted yes/no questions as declarative statements.

"Is it winter?" answered yes becomes "It is winter."; answered no it becomes
"It is not winter.".  The rule is purely positional: swap the fronted
auxiliary with the subject token, insert "not" after the auxiliary for a no,
drop the question mark, and terminate with a period.  Questions that do not
start with a recognized auxiliary are rejected rather than mangled.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NonBinaryAnswerError, UnsupportedQuestionError
from .metric import normalize_answer

AUXILIARIES = ("is", "are", "was", "were", "does", "do", "did", "can", "has", "have")


@dataclass(frozen=True)
class BinaryQA:
    """A yes/no question together with its answer."""

    question: str
    answer: str

    def __post_init__(self):
        # Question-form problems are reported before answer problems, so an
        # out-of-scope question is rejected as such even when its answer is
        # also non-binary.
        if not self.question.strip():
            raise UnsupportedQuestionError("question is empty")
        if not self.question.rstrip().endswith("?"):
            raise UnsupportedQuestionError(
                f"question must end with a question mark: {self.question!r}"
            )
        tokens = self.question.rstrip().rstrip("?").split()
        if len(tokens) < 2:
            raise UnsupportedQuestionError(
                f"question needs an auxiliary and a subject: {self.question!r}"
            )
        if tokens[0].lower() not in AUXILIARIES:
            raise UnsupportedQuestionError(
                f"question must start with one of {AUXILIARIES}, got {tokens[0]!r}"
            )
        if normalize_answer(self.answer) not in ("yes", "no"):
            raise NonBinaryAnswerError(
                f"answer must be yes or no, got {self.answer!r}"
            )


def qa_to_proposition(qa: BinaryQA) -> str:
    """The declarative statement asserted by the question and its answer."""
    body = qa.question.rstrip().rstrip("?").strip()
    tokens = body.split()
    if len(tokens) < 2:
        raise UnsupportedQuestionError(
            f"question needs an auxiliary and a subject: {qa.question!r}"
        )
    aux = tokens[0]
    if aux.lower() not in AUXILIARIES:
        raise UnsupportedQuestionError(
            f"question must start with one of {AUXILIARIES}, got {aux!r}"
        )
    subject = tokens[1]
    rest = tokens[2:]
    out = [subject[:1].upper() + subject[1:], aux.lower()]
    if normalize_answer(qa.answer) == "no":
        out.append("not")
    out.extend(rest)
    return " ".join(out) + "."
