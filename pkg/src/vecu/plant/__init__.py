"""Engine plant model, scenarios, bindings, and the closed-loop harness."""

from .binding import parse_bindings, print_bindings
from .harness import (PLANT_COLUMNS, RateCoupledHarness, TickDriver,
                      closed_loop_run, plant_rate_coupling)
from .model import (ACTUATOR_NAMES, SENSOR_NAMES, EngineState, Plant,
                    PlantConfig, initial_state, make_plant, parse_plant_config,
                    plant_step, sensors_of)
from .scenario import Scenario, parse_scenario

__all__ = [
    "ACTUATOR_NAMES",
    "EngineState",
    "PLANT_COLUMNS",
    "Plant",
    "PlantConfig",
    "RateCoupledHarness",
    "Scenario",
    "SENSOR_NAMES",
    "TickDriver",
    "closed_loop_run",
    "initial_state",
    "make_plant",
    "parse_bindings",
    "parse_plant_config",
    "parse_scenario",
    "plant_rate_coupling",
    "plant_step",
    "print_bindings",
    "sensors_of",
]
