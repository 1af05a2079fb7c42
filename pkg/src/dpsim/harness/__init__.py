from .config import Scenario, load_scenario, default_scenario, parse_scenario
from .metrics import MetricsReport, compute_metrics
from .mission import four_corner_mission, MissionSupervisor, HoldCondition
from .runner import run_scenario, RunResult
