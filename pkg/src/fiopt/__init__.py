"""Fixed-income asset allocation toolkit.

Bond analytics, rate and spread scenarios, rating-migration returns, portfolio
risk measures, a bounded-variable simplex solver, cutting-plane portfolio
optimisation and efficient-frontier fitting.
"""

from .credit import Curve, RatingCurveSet, TransitionMatrix, hurdle_yield
from .frontier import FrontierFit, FrontierPoint, fit_frontier, fit_ou, factorize_series, sweep_frontier
from .instruments import BulletBond, duration_convexity, price_bullet, stress_loss, yield_from_price
from .lp import LinearProgram, LpSolution, solve
from .optimizer import ConstraintConfig, build_constraints, cutting_plane_solve, maximize_er
from .risk import RiskConfig, portfolio_stdev, scenario_measure, total_risk
from .sleeve import Sleeve

__version__ = "0.1.0"
