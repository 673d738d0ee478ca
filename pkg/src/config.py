"""switchstab configuration."""

from pydantic_settings import BaseSettings, SettingsConfigDict


class SwitchSettings(BaseSettings):
    """switchstab configuration.

    Defaults reproduce the reference numerical experiment. Every field can be
    overridden through a ``SWITCHSTAB_``-prefixed environment variable or a
    ``.env`` file; CLI flags override both.
    """

    model_config = SettingsConfigDict(
        env_prefix="SWITCHSTAB_",
        env_file=".env",
        case_sensitive=False,
    )

    # Logging
    log_level: str = "INFO"

    # Instance generation
    n_stable: int = 1000
    n_unstable: int = 0
    phi_coeff: float = 0.1
    dwell_min: int = 2
    dwell_max: int = 4
    weight_a: float = 2.5  # edge weight bound A
    weight_b: float = 5.0  # dwell-scaled vertex weight bound B
    alpha: float = 0.0
    beta: float = 2.5
    extra_edges: int = 0
    strict_edges: bool = False

    # Experiment
    trials_per_length: int = 1000
    master_seed: int = 0
    sweep_detections: int = 100
    retry_factor: int = 10  # detection budget per length = retry_factor * |P_S|

    # Numerical tolerances
    rel_tol_closed_form: float = 1e-9
    rel_tol: float = 1e-6

    # Certificate sampling
    certificate_samples: int = 1000
    certificate_radius: float = 10.0
