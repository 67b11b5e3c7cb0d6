"""Subprocess plumbing between host arrays and the core engine.

The engine is driven through its command line only: inputs are written
as .npy files into a private temporary directory, results come back as
canonical JSON on stdout.  There is no shared-memory contract; the
input array is copied once at the boundary and the engine can never
mutate it or retain a reference past the call.  While the child process
runs, the interpreter lock is down in `subprocess` wait code, so other
host threads keep running.
"""

import json
import os
import shlex
import shutil
import subprocess
import sys
import tempfile

import numpy as np


def cli_command() -> list[str]:
    """Resolve the engine CLI.

    Override with BETTI_CLI (parsed shell-style, so it may carry
    arguments); otherwise use the `betti` console script if installed,
    falling back to the module entry point of this interpreter.
    """
    override = os.environ.get("BETTI_CLI")
    if override:
        return shlex.split(override)
    exe = shutil.which("betti")
    if exe:
        return [exe]
    return [sys.executable, "-m", "bettimatch.cli"]


def as_volume(array) -> np.ndarray:
    """Validate and normalize one host array at the boundary."""
    arr = np.asarray(array)
    if arr.ndim > 3:
        raise ValueError(f"expected an array of rank <= 3, got rank {arr.ndim}")
    if not np.issubdtype(arr.dtype, np.number) or np.iscomplexobj(arr):
        raise ValueError(f"expected a real-valued array, got dtype {arr.dtype}")
    return np.ascontiguousarray(arr, dtype=np.float64)


def run_core(subcommand: str, volumes, flags: list[str]) -> dict:
    """One engine invocation; returns the parsed JSON document.

    Exit statuses map onto host exceptions: 2 (invalid request) becomes
    ValueError, 1 (unreadable input) OSError, anything else RuntimeError.
    """
    command = cli_command()
    with tempfile.TemporaryDirectory(prefix="bettibind-") as workdir:
        paths = []
        for k, volume in enumerate(volumes):
            path = os.path.join(workdir, f"volume{k}.npy")
            np.save(path, volume)
            paths.append(path)
        proc = subprocess.run(
            command + [subcommand, *paths, *flags],
            capture_output=True,
            text=True,
        )
    if proc.returncode == 0:
        return json.loads(proc.stdout)
    message = proc.stderr.strip() or f"engine exited with status {proc.returncode}"
    if proc.returncode == 2:
        raise ValueError(message)
    if proc.returncode == 1:
        raise OSError(message)
    raise RuntimeError(message)
