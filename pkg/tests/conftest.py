import logging

import pytest

from trendmine.nb import LabeledExample, SentimentLabel, train
from trendmine.textprep import CandidateSpec

logging.getLogger("trendmine").setLevel(logging.WARNING)


@pytest.fixture
def candidates():
    return [
        CandidateSpec("obama", frozenset({"obama", "barack"})),
        CandidateSpec("romney", frozenset({"romney", "mitt"})),
    ]


@pytest.fixture
def micro_model():
    """Separable three-class model: win=+1, lose=-1, meh=0."""
    examples = [
        LabeledExample(("win",), "a", SentimentLabel.POSITIVE),
        LabeledExample(("win", "vote"), "a", SentimentLabel.POSITIVE),
        LabeledExample(("lose",), "a", SentimentLabel.NEGATIVE),
        LabeledExample(("lose", "vote"), "a", SentimentLabel.NEGATIVE),
        LabeledExample(("meh",), "a", SentimentLabel.NEUTRAL),
        LabeledExample(("meh", "vote"), "a", SentimentLabel.NEUTRAL),
    ]
    return train(examples)
