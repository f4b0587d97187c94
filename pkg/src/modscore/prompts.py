"""Few-shot prompt assembly.

A template carries three placeholders: {DEMOS} for the rendered
demonstration block, {QUESTION} for the target problem text, and
{FEW_SHOT_QUESTION} for the per-question format guidance. The guidance
sentence depends on the question's IO convention and is rendered once per
question slot (each demonstration and the final question).
"""

from __future__ import annotations

import re

from .errors import TemplateError

STANDARD_IO_GUIDANCE = "read from and write to standard IO"
CALL_BASED_GUIDANCE = "use the provided function signature"

IO_STYLES = {
    "standard": STANDARD_IO_GUIDANCE,
    "call-based": CALL_BASED_GUIDANCE,
}

PLACEHOLDERS = ("{QUESTION}", "{DEMOS}", "{FEW_SHOT_QUESTION}")

DEFAULT_TEMPLATE = """{DEMOS}QUESTION:
{QUESTION}
{FEW_SHOT_QUESTION}

ANSWER:
"""

_PLACEHOLDER_RE = re.compile(r"\{(QUESTION|DEMOS|FEW_SHOT_QUESTION)\}")


def render_demo(question: str, code: str, guidance: str) -> str:
    # plain concatenation: demo content may itself contain braces
    return f"QUESTION:\n{question}\n{guidance}\n\nANSWER:\n{code}\n\n"


def assemble_prompt(
    template: str,
    demos: list[tuple[str, str]],
    question: str,
    io_style: str = "standard",
) -> str:
    """Deterministic substitution; demo order is preserved.

    Placeholders are replaced in a single pass, so substituted content can
    never be re-expanded.
    """
    if io_style not in IO_STYLES:
        raise ValueError(f"io_style must be one of {sorted(IO_STYLES)}")
    for placeholder in PLACEHOLDERS:
        if placeholder not in template:
            raise TemplateError(placeholder)
    guidance = IO_STYLES[io_style]
    demo_block = "".join(render_demo(q, code, guidance) for q, code in demos)
    mapping = {
        "QUESTION": question,
        "DEMOS": demo_block,
        "FEW_SHOT_QUESTION": guidance,
    }
    return _PLACEHOLDER_RE.sub(lambda m: mapping[m.group(1)], template)
