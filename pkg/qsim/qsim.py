#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
qsim - Decentralized Queueing Simulator
"""

import sys
from qsim.core.cli.cli import print_banner, print_status, print_usage
from qsim.core.cli.parser import parse_args
from qsim.core.controller.controller import QsimController
from qsim.core.utils.errors import QsimError

async def dispatch(args, controller: QsimController):
    """Run one subcommand"""
    if args.command == 'run':
        result = await controller.run(
            instance=args.instance,
            config_file=args.config,
            policy=args.policy,
            horizon=args.horizon,
            seeds=args.seeds,
            seed=args.seed,
            service_mode=args.service_mode,
            mode=args.mode,
            gamma=args.gamma,
            harvest=False if args.no_harvest else None,
            out_dir=args.out_dir,
            concurrency=args.concurrency
        )
        controller.print_run(result)
        return result

    if args.command == 'sweep-refresh':
        probabilities = args.probabilities
        if probabilities is None and args.exponents is not None:
            probabilities = [2.0 ** e for e in args.exponents]
        result = await controller.sweep_refresh(
            instance=args.instance,
            probabilities=probabilities,
            policies=args.policies,
            horizon=args.horizon,
            seeds=args.seeds,
            seed=args.seed,
            out_dir=args.out_dir,
            concurrency=args.concurrency
        )
        if not controller.silent:
            print_status(f"Sweep saved to: {result['path']}", "success")
        return result

    if args.command == 'params':
        params = controller.params(
            epsilon=args.epsilon,
            delta=args.delta,
            n_queues=args.queues,
            n_servers=args.servers,
            instance=args.instance,
            log_base=args.log_base
        )
        controller.print_params(params)
        return params

    if args.command == 'solve':
        result = controller.solve(args.weights, args.step)
        controller.print_solution(result)
        return result

    rows = controller.catalog_rows()
    controller.print_catalog(rows)
    return rows

async def main(argv=None):
    """Main entry point"""
    args = parse_args(argv)

    if args.command is None:
        print_banner(force=True)
        print_usage()
        sys.exit(1)

    silent = args.silent
    if not silent:
        print_banner()

    controller = QsimController(verbose=0 if silent else args.verbose, silent=silent)
    try:
        return await dispatch(args, controller)
    except QsimError as e:
        print_status(str(e), "error", cli_only=silent)
        sys.exit(1)

if __name__ == "__main__":
    import asyncio
    asyncio.run(main())
