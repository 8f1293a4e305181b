"""Plain-text simulation scenarios (``key = value`` lines under ``[scenario]``)."""

from __future__ import annotations

import configparser
import io
from dataclasses import asdict, dataclass, fields

from .errors import InvalidParameterError
from .simulate import IntensityModel

SECTION = "scenario"


@dataclass(frozen=True)
class Scenario:
    a: float = 0.5
    b: float = 2.0
    beta0: float = 0.1
    renewal_eps: float = 0.0075
    d: int = 1
    n: int = 500
    seed: int = 0

    def __post_init__(self):
        self.model()
        if self.d < 1 or self.n < 1:
            raise InvalidParameterError("d and n must be positive integers")

    def model(self) -> IntensityModel:
        return IntensityModel(a=self.a, b=self.b, beta0=self.beta0, renewal_eps=self.renewal_eps)

    def to_text(self) -> str:
        parser = configparser.ConfigParser()
        parser[SECTION] = {k: repr(v) for k, v in asdict(self).items()}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str, **defaults) -> "Scenario":
        parser = configparser.ConfigParser()
        parser.read_string(text)
        if not parser.has_section(SECTION):
            raise InvalidParameterError(f"scenario file has no [{SECTION}] section")
        section = parser[SECTION]
        unknown = set(section) - {f.name for f in fields(cls)}
        if unknown:
            raise InvalidParameterError(f"unknown scenario keys: {', '.join(sorted(unknown))}")
        values = dict(defaults)
        for f in fields(cls):
            if f.name in section:
                cast = int if f.type in (int, "int") else float
                try:
                    values[f.name] = cast(section[f.name])
                except ValueError:
                    raise InvalidParameterError(f"bad value for {f.name}: {section[f.name]!r}") from None
        return cls(**values)
