"""Bundled reference models used by the test suite and the documentation.

``example_fig2``: two software functions over a CPU/RAM hardware layer, the
minimal system exercising port resolution and dependency weaving together.

``vehicle``: a radio-controlled car with redundant ultrasonic sensors and an
emergency-braking controller on the functional layer, battery and
microcontroller on the physical layer.  Only the failure paths reaching the
``EBC.no-emergency-braking`` top event are modelled; the sensors' false
positives and the radio receiver's failures are declared for completeness
but feed no analysed top event.
"""

from __future__ import annotations

from importlib import resources

from ..errors import ModelError
from ..model import ArchitectureModel, validate
from ..textfmt import parse

_FILES = {
    "example_fig2": "example_fig2.alfred",
    "vehicle": "vehicle.alfred",
}


def fixture_names() -> tuple[str, ...]:
    return tuple(sorted(_FILES))


def fixture_text(name: str) -> str:
    """Raw document of a bundled fixture."""
    try:
        filename = _FILES[name]
    except KeyError:
        raise ModelError(f"unknown fixture '{name}'") from None
    return resources.files(__package__).joinpath(filename).read_text(encoding="utf-8")


def load_fixture(name: str) -> ArchitectureModel:
    """Parse and validate a bundled fixture."""
    model = parse(fixture_text(name))
    report = validate(model)
    if not report.ok:
        details = "; ".join(f.render() for f in report.errors())
        raise ModelError(f"fixture '{name}' does not validate: {details}")
    return model
