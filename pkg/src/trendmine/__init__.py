"""Corpus analytics for tweet-like text.

Library, CLI, and a thin report-serving HTTP facade covering: flat-file
ingestion and day bucketing, a three-class Naive Bayes polarity classifier
with negation-aware preprocessing, temporal trend statistics, per-state
sentiment aggregation with a ratio-based winner rule, collapsed-Gibbs
topic extraction, and a seeded synthetic corpus generator.
"""

__version__ = "0.1.0"

from .errors import TrendmineError, ValidationError  # noqa: F401
from .records import (  # noqa: F401
    DailyBucket,
    GeoPoint,
    PollRecord,
    TimeWindow,
    TweetFormat,
    TweetRecord,
    bucket_by_day,
    load_polls,
    load_tweets,
    parse_tweet_record,
    sample_daily,
    serialize_tweet_record,
)
from .textprep import (  # noqa: F401
    CandidateSpec,
    clean,
    detect_mentions,
    mark_negation,
    preprocess,
    tokenize,
)
from .nb import (  # noqa: F401
    LabeledExample,
    NBModel,
    SentimentLabel,
    classify,
    classify_candidate,
    evaluate,
    log_posterior,
    train,
    word_likelihood,
)
from .geo import (  # noqa: F401
    KdTree2,
    StateCall,
    StatePoint,
    StateTally,
    Winner,
    aggregate_state_sentiment,
    build_kdtree,
    call_state,
    nearest_state,
    score_predictions,
)
from .lda import LdaConfig, LdaState, TopicReport, gibbs_sweep, init_state, top_words  # noqa: F401
from .lda import run as run_lda  # noqa: F401
from .trends import (  # noqa: F401
    Histogram,
    TrendSeries,
    daily_frequency,
    find_peaks,
    hashtag_histogram,
    mention_share,
    poll_leader_agreement,
    sentiment_trend,
    source_histogram,
)
from .synth import ScenarioSpec, StateScenario, generate, generate_labeled  # noqa: F401
