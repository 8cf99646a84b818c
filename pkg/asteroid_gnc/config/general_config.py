import os

OUTPUT_DIR_ENV = "ASTEROID_GNC_OUTPUT_DIR"


class GeneralConfig:
    def __init__(self, args):
        # General arguments
        self.command = getattr(args, 'command', None)
        self.config = getattr(args, 'config', None)
        self.out = getattr(args, 'out', None)
        self.dt_override = getattr(args, 'dt_override', None)
        self.quiet = getattr(args, 'quiet', False)
        self.log = getattr(args, 'log', None)
        self.log_file = None
        self.workers = getattr(args, 'workers', None)

        # validate-mesh / make-shape arguments
        self.shape = getattr(args, 'shape', None)
        self.units = getattr(args, 'units', None)
        self.synthetic = getattr(args, 'synthetic', None)
        self.subdivisions = getattr(args, 'subdivisions', None)
        self.format = getattr(args, 'format', None)

    def output_directory(self, scenario_directory=None):
        """--out, then the scenario's output.directory, then $ASTEROID_GNC_OUTPUT_DIR, then ./output."""
        return self.out or scenario_directory or os.environ.get(OUTPUT_DIR_ENV) or "output"

    def __str__(self):
        return ",\n".join(f"{key}={value}" for key, value in self.__dict__.items())
