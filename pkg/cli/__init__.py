# cli package
from cli.app import build_parser, main
from cli.executor import CommandExecutor, executor
from cli.run_config import RunConfig

__all__ = ["build_parser", "main", "CommandExecutor", "executor", "RunConfig"]
