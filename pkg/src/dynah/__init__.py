"""Q-learning, Dyna-Q and heuristic Dyna-H planning on random grid mazes."""
from dynah.astar_oracle import PathResult, astar_shortest
from dynah.experiment import (
    ExperimentConfig,
    LearningCurve,
    RunSummary,
    compare_algorithms,
    run_experiment,
    sweep_planning_steps,
)
from dynah.gridworld import (
    GridMap,
    MazeGenConfig,
    Move,
    Position,
    StepOutcome,
    generate_maze,
    is_solvable,
    step,
)
from dynah.heuristics import heuristic_action, squared_euclidean_badness
from dynah.rl_core import (
    AgentConfig,
    AgentKind,
    LearnedModel,
    QTable,
    dyna_h_plan,
    dyna_q_plan,
    epsilon_greedy,
    run_episode,
    td_update,
)

__version__ = "0.1.0"
