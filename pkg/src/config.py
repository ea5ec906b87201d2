import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class SimulationConfig:
    def __init__(self):
        # Parallelism (curves of a sweep, seeds of an ensemble)
        self.threads = int(os.getenv("DELAYFB_THREADS", "1"))

        # Logging
        self.log_level = os.getenv("DELAYFB_LOG_LEVEL", "INFO").upper()
        self.log_dir = os.getenv("DELAYFB_LOG_DIR", "./logs")
        self.log_to_file = os.getenv("DELAYFB_LOG_TO_FILE", "false").lower() == "true"

        # Output
        self.output_dir = os.getenv("DELAYFB_OUTPUT_DIR", "./output")

        # Solver defaults
        self.term_cap = int(os.getenv("DELAYFB_TERM_CAP", "4000"))
        self.quad_tol = float(os.getenv("DELAYFB_QUAD_TOL", "1e-11"))
        self.quad_max_depth = int(os.getenv("DELAYFB_QUAD_MAX_DEPTH", "50"))

    @property
    def worker_count(self) -> int:
        """Thread cap actually used by sweeps; never below one."""
        return max(1, self.threads)

    def validate_threads(self) -> None:
        """Validate the parallelism cap."""
        if self.threads < 1:
            raise ValueError(
                f"Invalid DELAYFB_THREADS: {self.threads}. Must be a positive integer"
            )

    def validate_quadrature(self) -> None:
        """Validate series and quadrature settings."""
        if not self.quad_tol > 0:
            raise ValueError(f"Invalid DELAYFB_QUAD_TOL: {self.quad_tol}. Must be > 0")
        if self.quad_max_depth < 1:
            raise ValueError(
                f"Invalid DELAYFB_QUAD_MAX_DEPTH: {self.quad_max_depth}. Must be >= 1"
            )
        if self.term_cap < 1:
            raise ValueError(f"Invalid DELAYFB_TERM_CAP: {self.term_cap}. Must be >= 1")

    def validate_log_level(self) -> None:
        """Validate logging configuration."""
        if self.log_level not in _LOG_LEVELS:
            raise ValueError(
                f"Invalid DELAYFB_LOG_LEVEL: {self.log_level}. "
                f"Must be one of: {', '.join(_LOG_LEVELS)}"
            )


config = SimulationConfig()
