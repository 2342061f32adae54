"""Gaze-swipe word decoding: fixation pruning, spatiotemporal matching,
language-model fusion, and the interaction layer around them."""

from .decoder import (
    CandidateRanking,
    CandidateScore,
    DecodeError,
    Decoder,
    DecoderConfig,
    TemplateTrace,
    decode,
    decode_midswipe,
    decode_raw_ablation,
    st_dtw,
    template_trace,
)
from .geometry import (
    Key,
    KeyboardLayout,
    LayoutError,
    build_qwerty_layout,
    load_layout,
    save_layout,
)
from .lexicon import (
    CharNgramModel,
    Lexicon,
    LexiconError,
    WordNgramModel,
    prefix_shortlist,
)
from .metrics import (
    TrialRecord,
    classify_keystrokes,
    learning_rate,
    match_rates,
    swipe_efficiency,
    ter,
    wpm,
)
from .session import (
    LastAction,
    PinchOutcome,
    ProtocolError,
    SessionEvent,
    TypingSession,
    replay_events,
)
from .synth import (
    SynthConfig,
    sample_words,
    synth_keypoints,
    synth_trace,
    synth_traces,
)
from .tap import TapConfig, infer_letter, p_gauss
from .trace_pipeline import (
    GazeSample,
    PipelineConfig,
    PrunedTrace,
    SampleLabel,
    TraceError,
    angular_velocity,
    dbscan_reduce,
    ivt_label,
    prune,
)

__version__ = "0.1.0"

__all__ = [
    "CandidateRanking",
    "CandidateScore",
    "CharNgramModel",
    "DecodeError",
    "Decoder",
    "DecoderConfig",
    "GazeSample",
    "Key",
    "KeyboardLayout",
    "LastAction",
    "LayoutError",
    "Lexicon",
    "LexiconError",
    "PinchOutcome",
    "PipelineConfig",
    "ProtocolError",
    "PrunedTrace",
    "SampleLabel",
    "SessionEvent",
    "SynthConfig",
    "TapConfig",
    "TemplateTrace",
    "TraceError",
    "TrialRecord",
    "TypingSession",
    "WordNgramModel",
    "angular_velocity",
    "build_qwerty_layout",
    "classify_keystrokes",
    "dbscan_reduce",
    "decode",
    "decode_midswipe",
    "decode_raw_ablation",
    "infer_letter",
    "ivt_label",
    "learning_rate",
    "load_layout",
    "match_rates",
    "p_gauss",
    "prefix_shortlist",
    "prune",
    "replay_events",
    "sample_words",
    "save_layout",
    "st_dtw",
    "swipe_efficiency",
    "synth_keypoints",
    "synth_trace",
    "synth_traces",
    "template_trace",
    "ter",
    "wpm",
]
