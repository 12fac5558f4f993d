"""Radio-based indoor tracking via time-reversal focusing.

Pipeline stages, each usable on its own:

* :mod:`trtrack.channel` — synthetic multipath channel responses
* :mod:`trtrack.trrs` — resonating strength between channel responses
* :mod:`trtrack.motion` — speed and moving distance from lag profiles
* :mod:`trtrack.heading` — gravity-projected gyroscope heading
* :mod:`trtrack.tracker` — floorplan-constrained dead reckoning
* :mod:`trtrack.pipeline` — full stream fusion
* :mod:`trtrack.experiments` — reproducible experiment scenarios
"""

from .bessel import j0
from .channel import Cir, Mpc, Scene, generate_scene, synthesize_cir, \
    synthesize_cirs, synthesize_trajectory, enumerate_mpcs
from .errors import (ConfigError, DataError, DegenerateInputError,
                     ParameterError, TrtrackError)
from .floorplan import FloorPlan, Landmark
from .heading import (HeadingDelta, ImuSample, accumulate_heading,
                      gravity_estimate, heading_delta, heading_series)
from .motion import (DistanceTrack, SpeedEstimate, estimate_speed,
                     find_first_peak, integrate_distance, packet_loss_sweep,
                     speed_series)
from .pipeline import TrackConfig, TrackResult, track
from .tracker import (PathHypothesis, TrackerConfig, TrackState,
                      dead_reckon_step, landmark_correct, make_track_state,
                      prune_and_reweight)
from .trrs import (TrrsMatrix, TrrsSeries, bessel_reference,
                   temporal_focusing_profile, trrs, trrs_series,
                   trrs_sliding_matrix)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
