from codeworlds.sandbox.errors import ERROR_CLASSES, ExecError
from codeworlds.sandbox.local import LocalExecutor
from codeworlds.sandbox.client import SandboxLimits, WorkerClient, WorkerPool

__all__ = ["ERROR_CLASSES", "ExecError", "LocalExecutor", "SandboxLimits", "WorkerClient", "WorkerPool"]
