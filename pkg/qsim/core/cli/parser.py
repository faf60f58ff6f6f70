#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Command line argument parser module
"""

import argparse

from qsim.core.handler.policy.factory import POLICY_KINDS

def _add_common(parser):
    parser.add_argument('-v', '--verbose',
                      action='count',
                      default=0,
                      help='Increase output verbosity (-v, -vv)')
    parser.add_argument('--silent', action='store_true',
                      help='Silent mode (no banner, no progress output)')

def _add_seeding(parser):
    parser.add_argument('--horizon',
                      type=int,
                      help='Slots per run (default: 200000)')
    parser.add_argument('--seeds',
                      type=int,
                      help='Number of replications (default: 1)')
    parser.add_argument('--seed',
                      type=int,
                      help='Master seed (falls back to QSIM_SEED, then config.yaml)')
    parser.add_argument('--concurrency',
                      type=int,
                      help='Replications run in parallel worker processes (default: 1)')
    parser.add_argument('-o', '--out-dir',
                      dest='out_dir',
                      help='Directory for CSV output (default: results)')

def create_parser():
    """Create and return argument parser"""
    parser = argparse.ArgumentParser(
        prog='qsim',
        description='qsim - decentralized learning in bipartite queueing systems'
    )
    subparsers = parser.add_subparsers(dest='command')

    run = subparsers.add_parser('run', help='Simulate an instance')
    source = run.add_mutually_exclusive_group()
    source.add_argument('-i', '--instance',
                      help='Catalog instance name (f1..f6, ex-failure)')
    source.add_argument('-c', '--config',
                      help='YAML instance file')
    run.add_argument('-p', '--policy',
                      choices=POLICY_KINDS,
                      help='Scheduling policy (default: dam-k)')
    run.add_argument('--service-mode',
                      dest='service_mode',
                      choices=['stochastic', 'forced'],
                      help='forced makes every selected request on a positive rate succeed')
    run.add_argument('--mode',
                      choices=['tuned', 'theoretical'],
                      help='Epoch constants (default: tuned)')
    run.add_argument('--gamma',
                      type=float,
                      help='Exploration exponent of dam-fe (default: 0.8)')
    run.add_argument('--no-harvest',
                      dest='no_harvest',
                      action='store_true',
                      help='dam-fe learns from exploration epochs only')
    _add_seeding(run)
    _add_common(run)

    sweep = subparsers.add_parser('sweep-refresh', help='Refresh-probability sweep with dynamic policies')
    sweep.add_argument('-i', '--instance',
                      help='Catalog instance to refresh (default: f6)')
    sweep.add_argument('--exponents',
                      type=int,
                      nargs='+',
                      help='Refresh probabilities 2^e (default: -19..0)')
    sweep.add_argument('--probabilities',
                      type=float,
                      nargs='+',
                      help='Explicit refresh probabilities (overrides --exponents)')
    sweep.add_argument('--policies',
                      nargs='+',
                      choices=POLICY_KINDS,
                      help='Policies to compare (default: dyn-dam-fe dyn-dam-ucb)')
    _add_seeding(sweep)
    _add_common(sweep)

    params = subparsers.add_parser('params', help='Print epoch constants')
    params.add_argument('-i', '--instance',
                      help='Take epsilon, delta, N and K from a catalog instance')
    params.add_argument('--epsilon', type=float, help='Traffic slackness')
    params.add_argument('--delta', type=float, help='Lower bound on nonzero service rates')
    params.add_argument('-n', '--queues', type=int, help='Number of queues N')
    params.add_argument('-k', '--servers', type=int, help='Number of servers K')
    params.add_argument('--log-base',
                      dest='log_base',
                      choices=['e', '2'],
                      help='Base of the log N term (default: e)')
    _add_common(params)

    solve = subparsers.add_parser('solve', help='Matching and certificate of a weight matrix')
    solve.add_argument('weights',
                      help='YAML file holding a 2-D list (or a mapping with key "weights")')
    solve.add_argument('--step',
                      type=float,
                      default=1.0 / 16.0,
                      help='Auction price step as a fraction of the weight (default: 0.0625)')
    _add_common(solve)

    catalog = subparsers.add_parser('catalog', help='List built-in instances')
    _add_common(catalog)

    return parser

def parse_args(argv=None):
    """Parse and return command line arguments"""
    parser = create_parser()
    return parser.parse_args(argv)
