"""Discrete-time simulator of UAV data collection under jamming, with a
self-contained deep Q-learning stack for training the collector, an
adversarial jammer, and jamming-aware defenses."""

from .agent import (DefenseConfig, DefenseMode, JammerTracker, RewardWeights,
                    apply_defense, uav_feature_length, uav_featurize,
                    uav_observe, uav_reward)
from .config import ConfigError, RunConfig, dump_yaml, load_config, parse_config
from .jammers import JammerKind, JammerSpec, emission
from .motion import Arena, KinematicLimits, Pose, Rect, Vec2
from .radio import NodeMode, NodeState, RadioParams, RegionScene, reliable_region
from .tasks import FrozenUavPolicy, JammerDriver, JammerTask, UavTask
from .world import EpisodeRecord, StepEvents, WorldConfig, WorldState, aggregate

__version__ = "1.0.0"

__all__ = [
    "Arena", "ConfigError", "DefenseConfig", "DefenseMode", "EpisodeRecord",
    "FrozenUavPolicy", "JammerDriver", "JammerKind", "JammerSpec",
    "JammerTask", "JammerTracker", "KinematicLimits", "NodeMode", "NodeState",
    "Pose", "RadioParams", "Rect", "RegionScene", "RewardWeights",
    "RunConfig", "StepEvents", "UavTask", "Vec2", "WorldConfig", "WorldState",
    "aggregate", "apply_defense", "dump_yaml", "emission", "load_config",
    "parse_config", "reliable_region", "uav_feature_length", "uav_featurize",
    "uav_observe", "uav_reward",
]
