"""Prompt templates, completion clients, and the staged generation pipeline."""

from .client import (
    CallableClient,
    CompletionClient,
    CompletionError,
    HttpCompletionClient,
    ModelParams,
    RateLimitedClient,
    RateLimiter,
)
from .pipeline import (
    GenerationConfig,
    GenerationResult,
    RetryPolicy,
    RunSummary,
    batch_generate,
    quality_flags,
    run_pipeline,
)
from .templates import (
    BUILTIN_TEMPLATES,
    PromptTemplate,
    RenderedPrompt,
    load_template,
    render_prompt,
    resolve_template,
    save_template,
)

__all__ = [
    "BUILTIN_TEMPLATES",
    "CallableClient",
    "CompletionClient",
    "CompletionError",
    "GenerationConfig",
    "GenerationResult",
    "HttpCompletionClient",
    "ModelParams",
    "PromptTemplate",
    "RateLimitedClient",
    "RateLimiter",
    "RenderedPrompt",
    "RetryPolicy",
    "RunSummary",
    "batch_generate",
    "load_template",
    "quality_flags",
    "render_prompt",
    "resolve_template",
    "run_pipeline",
    "save_template",
]
