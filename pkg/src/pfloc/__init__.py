"""WiFi-RSS fingerprint particle-filter localization toolkit."""

from .filtering import (
    DegenerateFilterError,
    FilterConfig,
    OdometryDelta,
    ParticleSet,
    effective_sample_size,
    estimate_position,
    estimate_position_weighted,
    init_particles,
    normalize_weights,
    predict,
    resample_multinomial,
    should_resample,
    step,
    update_weights,
)
from .grid import GridPosterior, grid_posterior, posterior_mean
from .rfmap import (
    Landmark,
    Map,
    MapFormatError,
    Point2,
    load_map,
    nearest_landmark,
    predicted_rss,
    save_map,
)
from .sim import (
    BatchSummary,
    RadioModel,
    ScenarioConfig,
    TrialResult,
    default_scenario,
    generate_synthetic_map,
    position_error,
    run_batch,
    run_trial,
    simulate_measurement,
)

__version__ = "0.1.0"
