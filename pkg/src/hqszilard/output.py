"""Table emission (CSV with ``#`` headers, or JSON) and unit conversion."""
import datetime
import json
import math
from dataclasses import dataclass

from . import __version__

K_BOLTZMANN = 1.380649e-23  # J/K


@dataclass(frozen=True)
class PhysicalUnits:
    """SI scales for mass (kg), angular frequency (rad/s), hbar (J s), temperature (K)."""

    m: float
    omega: float
    hbar: float
    temperature: float

    def __post_init__(self):
        for name in ("m", "omega", "hbar", "temperature"):
            if not getattr(self, name) > 0:
                raise ValueError(f"physical unit {name} must be positive")

    @property
    def energy(self):
        return self.hbar * self.omega

    @property
    def length(self):
        """Oscillator length sqrt(hbar / (m omega)), the unit of q0."""
        return math.sqrt(self.hbar / (self.m * self.omega))

    @property
    def force(self):
        return self.energy / self.length

    @property
    def theta(self):
        return self.energy / (K_BOLTZMANN * self.temperature)

    def header(self):
        return [f"physical units: m={self.m:g} kg, omega={self.omega:g} rad/s, "
                f"hbar={self.hbar:g} J s, T={self.temperature:g} K",
                f"energy unit hbar*omega = {self.energy:.10g} J; length unit = {self.length:.10g} m; "
                f"force unit = {self.force:.10g} N; entropy unit k_B = {K_BOLTZMANN} J/K"]


NATURAL_UNITS_HEADER = [
    "units: natural (hbar = m = omega = 1); energies and free energies in hbar*omega, "
    "entropies in k_B, q0 in sqrt(hbar/(m omega)), x0 = sqrt(2) q0, forces in hbar*omega per unit q0",
]


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def emit(stream, columns, rows, config, notes=(), fmt="csv", timestamp=True):
    """Write a table to ``stream``; identical inputs give identical bytes.

    Parameters
    ----------
    columns : list of str
    rows : iterable of sequences, one value per column
    config : dict
        Echoed in the header (CSV) or under ``config`` (JSON).
    notes : list of str
        Extra header lines (units, sign conventions).
    """
    rows = [list(r) for r in rows]
    if fmt == "json":
        cfg = {k: _jsonable(v) for k, v in config.items()}
        doc = {"config": cfg, "notes": list(notes), "columns": list(columns),
               "rows": [[_jsonable(v) for v in r] for r in rows]}
        if timestamp:
            doc["generated"] = _now()
        json.dump(doc, stream, indent=2, allow_nan=False)
        stream.write("\n")
        return
    stream.write(f"# hqszilard {__version__}\n")
    if timestamp:
        stream.write(f"# generated: {_now()}\n")
    for key in sorted(config):
        stream.write(f"# {key} = {_fmt(config[key])}\n")
    for line in notes:
        stream.write(f"# {line}\n")
    stream.write(",".join(columns) + "\n")
    for r in rows:
        stream.write(",".join(_fmt(v) for v in r) + "\n")


def _now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
