import importlib
import inspect
import json
import time
from datetime import datetime, timezone
import os
import sys
from pathlib import Path
from typing import Any, List, Optional, Sequence

import psutil
from rich import print as _print
from rich.markup import escape

_DEBUG_ENABLED = bool(os.environ.get("PROPERAD_HTT_DEBUG"))


class DomainError(ValueError):
    """
    Invalid mathematical input.

    Every domain error carries a machine-readable code (for example
    'directed-cycle' or 'd-not-square-zero') next to the human message.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"[{code}] {message}")
        self.code = code
        self.message = message


class InputFormatError(DomainError):
    """Malformed JSON input, located by file, line and column."""

    def __init__(self, path: Path, line: int, column: int, message: str):
        super().__init__("malformed-json", f"{path}:{line}:{column}: {message}")
        self.path = path
        self.line = line
        self.column = column


def load_json(path: Path) -> Any:
    """
    Read a JSON document.

    Raises:
        FileNotFoundError: If the file does not exist
        InputFormatError: If the file is not valid JSON
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Input file not found: {path}")
    with open(path) as f:
        text = f.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(path, e.lineno, e.colno, e.msg) from e


def set_debug(enabled: bool) -> None:
    """Turn DEBUG log lines on or off for the whole process."""
    global _DEBUG_ENABLED
    _DEBUG_ENABLED = enabled or bool(os.environ.get("PROPERAD_HTT_DEBUG"))


def Print(logType: str, message: str) -> None:
    """
    Prints a log message with timestamp, function name, symbols wrapping the logType, and the message.

    DEBUG messages are dropped unless debugging was enabled through set_debug()
    or the PROPERAD_HTT_DEBUG environment variable.
    """
    try:
        logTypeUpper = logType.upper()
        if logTypeUpper == 'DEBUG' and not _DEBUG_ENABLED:
            return

        # Mapping of logType to symbols
        logTypeSymbols = {
            'SUCCESS': ('^^^', '^^^'),
            'FAILURE': ('###', '###'),
            'STATE': ('~~~', '~~~'),
            'INFO': ('---', '---'),
            'IMPORTANT': ('===', '==='),
            'CRITICAL': ('***', '***'),
            'EXCEPTION': ('!!!', '!!!'),
            'WARNING': ('(((', ')))'),
            'DEBUG': ('[[[', ']]]'),
            'ATTEMPT': ('???', '???'),
            'STARTING': ('>>>', '>>>'),
            'PROGRESS': ('vvv', 'vvv'),
            'COMPLETED': ('<<<', '<<<'),
        }

        # Mapping of logType to styles
        logTypeStyles = {
            'SUCCESS': 'green',
            'FAILURE': 'red bold',
            'STATE': 'cyan',
            'INFO': 'blue',
            'IMPORTANT': 'magenta',
            'CRITICAL': 'red bold',
            'EXCEPTION': 'red bold',
            'WARNING': 'yellow',
            'DEBUG': 'white',
            'ATTEMPT': 'cyan',
            'STARTING': 'green',
            'PROGRESS': 'blue',
            'COMPLETED': 'green',
        }

        current_time = time.time()
        timestamp = datetime.fromtimestamp(current_time, tz=timezone.utc).isoformat(timespec='microseconds') + 'Z'

        before_symbol, after_symbol = logTypeSymbols.get(logTypeUpper, ('', ''))
        formattedLogType = f"{before_symbol} {logTypeUpper} {after_symbol}"

        style = logTypeStyles.get(logTypeUpper, '')
        if style:
            formattedLogType = f"[{style}]{formattedLogType}[/{style}]"

        # Walk frames directly; inspect.stack() reads source files on every call
        frame = inspect.currentframe()
        caller = frame.f_back if frame is not None else None
        function_name = caller.f_code.co_name if caller is not None else '<unknown>'

        functionNamePadding = 40
        paddedFunctionName = function_name.ljust(functionNamePadding)

        # Tree literals and vector keys contain brackets, never markup
        output_line = f"{timestamp} {formattedLogType} {paddedFunctionName} {escape(message)}"

        # stdout is reserved for command output
        _print(output_line, file=sys.stderr)

    except Exception as e:
        error_message = f"Something went wrong when attempting to print.\nError: {e}"
        print(error_message, file=sys.stderr)


def CPU_and_Mem_usage() -> str:
    """
    Returns a string with the CPU usage and memory usage of the current process.
    """
    current_process = psutil.Process(os.getpid())
    cpu_usage = psutil.cpu_percent(interval=0.1)
    memory_info = current_process.memory_info()
    memory_usage_mb = memory_info.rss / (1024 ** 2)
    return f"CPU Usage: {cpu_usage}%, Process Memory Usage: {memory_usage_mb:.2f} MB"


def thread_budget(configured: Optional[int] = None, env_var: str = "PROPERAD_HTT_THREADS") -> int:
    """
    Number of worker threads a suite may use.

    The environment variable wins over the configured value; without either,
    one thread per physical core.

    Args:
        configured: Value from config.json (None for automatic)
        env_var: Name of the overriding environment variable

    Returns:
        Positive thread count
    """
    raw = os.environ.get(env_var)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            Print("WARNING", f"Ignoring non-integer {env_var}={raw!r}")
    if configured:
        return max(1, int(configured))
    return max(1, psutil.cpu_count(logical=False) or 1)


def import_plugins(package: str, modules: Sequence[str]) -> List[str]:
    """
    Import the registering modules of a package, in order.

    A module that fails to import is logged and skipped so the rest still
    register; the names of the skipped modules are returned.
    """
    skipped = []
    for module in modules:
        try:
            importlib.import_module(f"{package}.{module}")
        except ImportError as e:
            Print("WARNING", f"Skipping {package}.{module}: {e}")
            skipped.append(module)
    return skipped
