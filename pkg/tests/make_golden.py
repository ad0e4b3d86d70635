"""Regenerate the frozen traces in tests/golden (run only after an intended behaviour change)."""

from pathlib import Path

from capcover.rounding import format_trace, run_pipeline
from capcover.scenarios import light_rich, saturated, tight_uniform

GOLDEN = Path(__file__).with_name("golden")


def cases():
    yield "saturated_1_monotonic", saturated(1, "monotonic")
    yield "saturated_2_uniform", saturated(2, "uniform")
    yield "light_rich_0_uniform", light_rich(0, "uniform")
    inst, sigma, _ = tight_uniform()
    yield "tight_uniform", (inst, sigma)


if __name__ == "__main__":
    for name, (inst, sigma) in cases():
        (GOLDEN / f"{name}.trace").write_text(format_trace(run_pipeline(inst, sigma_star=sigma).trace))
