"""Engine configuration: defaults, the plain-text config file, and the
registry of parameters an operator may change at runtime.

Config files are `key = value` lines in SI units; `#` starts a comment.
Unknown keys are rejected so typos surface immediately. Robot endpoints use
`robot.<id>.addr = <host>:<port>` or `robot.<id>.addr = serial:<device>`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .motion import ProfileParams, YawGains
from .potential import MaskSpec
from .radio import RobotEndpoint, parse_endpoint
from .strategy import RoleKind, RolePolicy, StrategyConfig
from .world import BALL_RADIUS, FieldGeometry, RobotParams


def default_masks(params: RobotParams) -> tuple[MaskSpec, ...]:
    return (
        MaskSpec("shadow", 2.0, {"r_block": params.robot_radius + BALL_RADIUS}),
        MaskSpec("gradient", 1.0, {"from_value": 0.0, "to_value": 1.0,
                                   "direction": (1.0, 0.0)}),
        MaskSpec("crowd", 0.5, {"falloff": 1.0}),
    )


@dataclass(frozen=True)
class SimParams:
    ball_friction: float = 0.5  # m/s^2 decel on a free ball
    kick_speed_max: float = 6.5  # m/s at power 100
    capture_distance: float = 0.1  # m from robot center
    capture_half_angle: float = math.radians(20.0)
    seed: int = 0

    def __post_init__(self):
        if min(self.ball_friction, self.kick_speed_max,
               self.capture_distance, self.capture_half_angle) <= 0:
            raise ValueError("simulator magnitudes must be positive")


@dataclass(frozen=True)
class EngineConfig:
    geo: FieldGeometry = field(default_factory=FieldGeometry)
    params: RobotParams = field(default_factory=RobotParams)
    profile: ProfileParams = field(default_factory=ProfileParams)
    gains: YawGains = field(default_factory=YawGains)
    omega_limit: float = 6.0  # rad/s
    frame_rate: float = 60.0  # Hz; the tick budget is one frame period
    cell_size: float = 0.1  # m, pass grid resolution
    masks: tuple[MaskSpec, ...] = ()
    policy: RolePolicy = field(default_factory=RolePolicy)
    path_margin: float = 0.05  # m
    path_max_depth: int = 6
    sim: SimParams = field(default_factory=SimParams)
    vision_port: int = 10020
    referee_port: int = 10021
    gateway_port: int = 8080
    gateway_token: str = ""
    snapshot_hz: float = 30.0
    endpoints: tuple[RobotEndpoint, ...] = ()

    def __post_init__(self):
        if not self.masks:
            object.__setattr__(self, "masks", default_masks(self.params))

    @property
    def dt(self) -> float:
        return 1.0 / self.frame_rate

    def strategy_config(self) -> StrategyConfig:
        return StrategyConfig(
            params=self.params,
            policy=self.policy,
            ball_friction=self.sim.ball_friction,
            kick_speed_max=self.sim.kick_speed_max,
        )


# operator-tunable keys: name -> (section attribute, field name)
TUNABLE_PARAMS = {
    "a_max": ("profile", "a_max"),
    "v_max": ("profile", "v_max"),
    "v_cut": ("profile", "v_cut"),
    "stop_epsilon": ("profile", "stop_epsilon"),
    "yaw_kp": ("gains", "kp"),
    "yaw_kd": ("gains", "kd"),
    "omega_limit": (None, "omega_limit"),
    "path_margin": (None, "path_margin"),
}


def set_param(cfg: EngineConfig, name: str, value: float) -> EngineConfig:
    """New config with one tunable changed; unknown names are rejected."""
    if name not in TUNABLE_PARAMS:
        raise KeyError(f"unknown or non-tunable parameter {name!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ValueError("parameter value must be finite")
    section, attr = TUNABLE_PARAMS[name]
    if section is None:
        return replace(cfg, **{attr: value})
    return replace(cfg, **{section: replace(getattr(cfg, section), **{attr: value})})


def _parse_kv(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _role_list(text: str) -> tuple[RoleKind, ...]:
    by_name = {k.value: k for k in RoleKind}
    kinds = []
    for token in text.split(","):
        token = token.strip()
        if token not in by_name:
            raise ValueError(f"unknown role kind {token!r}")
        kinds.append(by_name[token])
    return tuple(kinds)


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Defaults overlaid with the optional config file."""
    if path is None:
        return EngineConfig()
    values = _parse_kv(Path(path).read_text())
    return config_from_values(values)


def config_from_values(values: dict[str, str]) -> EngineConfig:
    base = EngineConfig()
    geo_kw: dict[str, float] = {}
    robot_kw: dict[str, object] = {}
    profile_kw: dict[str, float] = {}
    gains_kw: dict[str, float] = {}
    sim_kw: dict[str, object] = {}
    top_kw: dict[str, object] = {}
    policy_kw: dict[str, tuple[RoleKind, ...]] = {}
    mask_weights: dict[str, float] = {}
    crowd_falloff: float | None = None
    endpoints: list[RobotEndpoint] = []

    simple_geo = {"field.length": "length", "field.width": "width",
                  "field.penalty_depth": "penalty_depth",
                  "field.penalty_width": "penalty_width",
                  "field.goal_width": "goal_width",
                  "field.boundary_margin": "boundary_margin"}
    simple_robot = {"robot.wheel_radius": "wheel_radius",
                    "robot.wheel_offset_radius": "wheel_offset_radius",
                    "robot.max_wheel_rpm": "max_wheel_rpm",
                    "robot.radius": "robot_radius",
                    "robot.com_height": "com_height"}
    simple_profile = {"motion.a_max": "a_max", "motion.v_max": "v_max",
                      "motion.v_cut": "v_cut", "motion.stop_epsilon": "stop_epsilon"}
    simple_gains = {"motion.yaw_kp": "kp", "motion.yaw_kd": "kd"}
    simple_sim = {"sim.ball_friction": "ball_friction",
                  "sim.kick_speed_max": "kick_speed_max",
                  "sim.capture_distance": "capture_distance"}
    simple_top = {"motion.omega_limit": ("omega_limit", float),
                  "engine.frame_rate": ("frame_rate", float),
                  "grid.cell_size": ("cell_size", float),
                  "path.margin": ("path_margin", float),
                  "path.max_depth": ("path_max_depth", int),
                  "net.vision_port": ("vision_port", int),
                  "net.referee_port": ("referee_port", int),
                  "gateway.port": ("gateway_port", int),
                  "gateway.token": ("gateway_token", str),
                  "gateway.snapshot_hz": ("snapshot_hz", float)}

    for key, value in values.items():
        if key in simple_geo:
            geo_kw[simple_geo[key]] = float(value)
        elif key in simple_robot:
            robot_kw[simple_robot[key]] = float(value)
        elif key == "robot.wheel_azimuths_deg":
            azimuths = tuple(math.radians(float(v)) for v in value.split(","))
            if len(azimuths) != 4:
                raise ValueError("robot.wheel_azimuths_deg needs 4 angles")
            robot_kw["wheel_azimuths"] = azimuths
        elif key in simple_profile:
            profile_kw[simple_profile[key]] = float(value)
        elif key in simple_gains:
            gains_kw[simple_gains[key]] = float(value)
        elif key in simple_sim:
            sim_kw[simple_sim[key]] = float(value)
        elif key == "sim.capture_half_angle_deg":
            sim_kw["capture_half_angle"] = math.radians(float(value))
        elif key == "sim.seed":
            sim_kw["seed"] = int(value)
        elif key in simple_top:
            attr, cast = simple_top[key]
            top_kw[attr] = cast(value)
        elif key == "roles.attacking":
            policy_kw["attacking"] = _role_list(value)
        elif key == "roles.defending":
            policy_kw["defending"] = _role_list(value)
        elif key in ("mask.shadow.weight", "mask.gradient.weight", "mask.crowd.weight"):
            mask_weights[key.split(".")[1]] = float(value)
        elif key == "mask.crowd.falloff":
            crowd_falloff = float(value)
        elif key.startswith("robot.") and key.endswith(".addr"):
            robot_id = int(key.split(".")[1])
            endpoints.append(parse_endpoint(robot_id, value))
        else:
            raise ValueError(f"unknown config key {key!r}")

    geo = replace(base.geo, **geo_kw) if geo_kw else base.geo
    params = replace(base.params, **robot_kw) if robot_kw else base.params
    profile = replace(base.profile, **profile_kw) if profile_kw else base.profile
    gains = replace(base.gains, **gains_kw) if gains_kw else base.gains
    sim = replace(base.sim, **sim_kw) if sim_kw else base.sim
    policy = replace(base.policy, **policy_kw) if policy_kw else base.policy

    masks = []
    for mask in default_masks(params):
        weight = mask_weights.get(mask.kind, mask.weight)
        params_dict = dict(mask.params)
        if mask.kind == "crowd" and crowd_falloff is not None:
            params_dict["falloff"] = crowd_falloff
        masks.append(MaskSpec(mask.kind, weight, params_dict))

    return EngineConfig(
        geo=geo, params=params, profile=profile, gains=gains, sim=sim,
        policy=policy, masks=tuple(masks), endpoints=tuple(endpoints), **top_kw,
    )
