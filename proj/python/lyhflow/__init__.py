"""Space-time connection identities, Harnack quadratics and surface Ricci flow."""

from ._lyhflow import (
    ConfigError,
    LyhflowError,
    __version__,
    catalog_names,
    convention_hash,
    execute,
    harnack_sweep,
    identity_suite,
    run_flow,
    soliton_suite,
)

__all__ = [
    "ConfigError",
    "LyhflowError",
    "__version__",
    "catalog_names",
    "convention_hash",
    "execute",
    "harnack_sweep",
    "identity_suite",
    "run_flow",
    "soliton_suite",
]
