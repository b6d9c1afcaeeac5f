"""Python access to the wardsim cart simulator."""

from ._core import (
    CameraModel,
    CartOutcome,
    DigitDetection,
    ParseError,
    PidGains,
    PidState,
    Pose,
    RouteStep,
    TraceReport,
    TrackMap,
    ValidationError,
    Vec2,
    VehicleParams,
    VehicleState,
    apply_motor,
    classify_ward,
    default_map,
    detect_placards,
    gains_from_classical,
    load_map,
    pid_step,
    plan_length,
    render,
    route_to,
    run_scenario_file,
    run_ward,
    vision_corpus,
)

__all__ = [name for name in dir() if not name.startswith("_")]
