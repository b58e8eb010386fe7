from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances used across construction and verification."""

    root_tol: float = 1e-12
    quad_abs_tol: float = 1e-10
    invariant_rel_tol: float = 1e-6
    degenerate_cprime_tol: float = 1e-8
    glue_value_tol: float = 1e-9
    tail_cutoff_epsilon: float = 1e-8

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValueError(f"tolerance {f.name} must be strictly positive, got {value!r}")

    def with_overrides(self, **overrides):
        unknown = set(overrides) - {f.name for f in fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in overrides.items()})

    def to_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = ToleranceConfig()
