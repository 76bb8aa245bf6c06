"""Exception hierarchy. ``exit_code`` is what the CLI returns for each kind."""


class HealthgradeError(Exception):
    exit_code = 2


class UsageError(HealthgradeError):
    exit_code = 1


class DataError(HealthgradeError):
    exit_code = 2


class CorpusFormatError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateDatasetError(DataError):
    pass


class FingerprintMismatchError(DataError):
    pass


class ArtifactError(DataError):
    pass


class TrainingError(HealthgradeError):
    exit_code = 3


class ConvergenceError(TrainingError):
    def __init__(self, message, iterations=None, residual=None):
        self.iterations = iterations
        self.residual = residual
        super().__init__(message)
