from ._mixlab import (
    ConfigError,
    ConvergenceError,
    DomainError,
    Error,
    Gibbs,
    InvariantViolation,
    Model,
    SizeError,
    correlation,
    decay_profile,
    dolgopyat,
    entropy,
    fixed_point_count,
    fractional_moment,
    gibbs,
    li,
    necklace_count,
    orbit_counting,
    pressure,
    set_thread_cap,
    transfer_sup,
    uni_scan,
)

__all__ = [name for name in dir() if not name.startswith("_")]
