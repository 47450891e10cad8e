from .core import (
    Lemma2Verdict,
    OptLimitError,
    OptLimits,
    OptResult,
    available_backends,
    default_backend,
    exact_opt,
    lemma2_check,
)
