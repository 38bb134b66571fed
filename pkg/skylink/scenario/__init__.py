from .config import (DeploymentKind, ScenarioConfig, ValidatedConfig, validate_config,
                     with_design_point, N_CELLS, N_SITES, N_SECTORS)
from .radio import RadioConstants, derive_radio_constants, noise_power_dbm
