#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
CLI utilities module
"""

import sys
import os
from typing import Dict, Iterable, List

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.box import ROUNDED

console = Console()

def get_version():
    """Get version from __version__.py"""
    try:
        version_file = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(__file__))), '__version__.py')
        version = {}
        with open(version_file, 'r', encoding='utf-8') as f:
            exec(f.read(), version)
        return version.get('__version__', '0.1.0')
    except OSError:
        return '0.1.0'

def is_cli_mode():
    """Check if running in CLI mode"""
    return sys.stdin.isatty()

def print_banner(force=False):
    """Print banner only in CLI mode unless forced"""
    if not is_cli_mode() and not force:
        return

    version = get_version()
    banner = rf"""
     ____  ___ ___ __  __
    / __ \/ __|_ _|  \/  |   queues  ->  servers
   | (__) \__ \| || |\/| |   one bid per slot
    \__\_\|___/___|_|  |_|   v{version}
    """

    banner_panel = Panel(
        banner,
        title="[bold cyan]Decentralized Queueing Simulator[/]",
        subtitle="[bold blue]auction agents, MaxWeight and baselines[/]",
        style="bold blue",
        box=ROUNDED
    )
    console.print(banner_panel)

def print_usage():
    """Print usage information"""
    usage_table = Table(
        title="[bold cyan]qsim Usage Guide[/]",
        box=ROUNDED,
        show_header=True,
        header_style="bold magenta"
    )

    usage_table.add_column("Command", style="cyan", justify="left")
    usage_table.add_column("Description", style="white", justify="left")
    usage_table.add_column("Example", style="green", justify="left")

    usage_table.add_row(
        "qsim run",
        "Simulate a catalog instance or config file",
        "qsim run --instance f2 --policy dam-ucb --horizon 200000 --seeds 5"
    )
    usage_table.add_row(
        "qsim sweep-refresh",
        "Refresh-probability sweep on the dynamic instance",
        "qsim sweep-refresh --exponents -4 -2 0 --seeds 3"
    )
    usage_table.add_row(
        "qsim params",
        "Epoch constants, tuned and theoretical",
        "qsim params --epsilon 0.25 --delta 0.1875 -n 4 -k 4"
    )
    usage_table.add_row(
        "qsim solve <file>",
        "Max-weight matching and auction certificate of a weight matrix",
        "qsim solve weights.yaml --step 0.0625"
    )
    usage_table.add_row(
        "qsim catalog",
        "List built-in instances and check their slackness",
        "qsim catalog"
    )

    options_table = Table(
        title="[bold cyan]Available Options (run)[/]",
        box=ROUNDED,
        show_header=True,
        header_style="bold magenta"
    )

    options_table.add_column("Option", style="cyan", justify="left")
    options_table.add_column("Description", style="white", justify="left")

    options_table.add_row("-h, --help", "Show this help message")
    options_table.add_row("-i, --instance", "Catalog instance (f1..f6, ex-failure)")
    options_table.add_row("-c, --config", "YAML instance file")
    options_table.add_row("-p, --policy", "dam-k, dam-fe, dam-ucb, dyn-dam-ucb, dyn-dam-fe, maxweight, fixed, random")
    options_table.add_row("--horizon", "Slots per run (default: 200000)")
    options_table.add_row("--seeds", "Number of replications (default: 1)")
    options_table.add_row("--seed", "Master seed (fallback: QSIM_SEED)")
    options_table.add_row("--service-mode", "stochastic (default) or forced")
    options_table.add_row("--mode", "Epoch constants: tuned (default) or theoretical")
    options_table.add_row("--gamma", "Exploration exponent of dam-fe (default: 0.8)")
    options_table.add_row("-o, --out-dir", "Directory for CSV output")
    options_table.add_row("-v, --verbose", "Increase output verbosity (-v, -vv)")
    options_table.add_row("--silent", "Silent mode (no banner, no progress output)")

    console.print("\n[bold cyan]Description:[/]")
    console.print("qsim simulates queues that learn, without coordination, which server to bid for.\n")

    console.print(usage_table)
    console.print("\n")
    console.print(options_table)
    console.print("\n[bold cyan]Note:[/] Configure default settings in config.yaml\n")

def print_status(message, status="info", cli_only=True):
    """Print status messages with color coding"""
    if cli_only and not is_cli_mode():
        return

    colors = {
        "info": "blue",
        "success": "green",
        "warning": "yellow",
        "error": "red"
    }

    icons = {
        "info": "ℹ️",
        "success": "✅",
        "warning": "⚠️",
        "error": "❌"
    }

    console.print(f"[bold {colors[status]}]{icons[status]} {message}[/]")

def print_table(title: str, columns: List[str], rows: Iterable[Iterable], cli_only=True):
    """Render rows as a rounded rich table"""
    if cli_only and not is_cli_mode():
        return
    table = Table(title=f"[bold cyan]{title}[/]", box=ROUNDED, show_header=True, header_style="bold magenta")
    for i, column in enumerate(columns):
        table.add_column(column, style="cyan" if i == 0 else "white", justify="left" if i == 0 else "right")
    for row in rows:
        table.add_row(*[str(cell) for cell in row])
    console.print(table)

def print_mapping(title: str, values: Dict, cli_only=True):
    print_table(title, ["Field", "Value"], values.items(), cli_only=cli_only)
