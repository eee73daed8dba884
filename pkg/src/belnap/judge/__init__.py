from .backend import BackendError, ChatCompletionBackend, ChatRequest, Completion, MockBackend
from .config import ConfigError, JudgeConfig, load_config
from .core import (
    BilateralResult,
    Judge,
    QAItem,
    RelationTemplate,
    SideResult,
    TemplateError,
    Transcript,
    prompt_slots,
    subject_key,
    verbalize,
)
from .parsing import majority, parse_conclusion
from .templates import MARKERS, render, template_for
