#!/usr/bin/env python3
"""
Federated Learning Simulator - command line interface

    flsim run --config=EXP.yaml {federation|centralized|clients-only} ALG.yaml
    flsim get config NAME [--force]
    flsim get list
"""

import argparse
import sys
import os
from typing import List, Optional

# Add the project root to the Python path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from config import get_config
from logging_config import setup_logging
from models.experiment_config import LogFormat
from services.error_service import EXIT_OK, ConfigError, ErrorService
from services.experiment_service import ExperimentService, ExperimentType
from services.round_log_service import RoundLogService
from services.template_service import TemplateService
from validators.config_validator import load_algorithm_config, load_experiment_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='flsim', description='Single-process federated learning simulator')
    parser.add_argument('--verbose', '-v', action='store_true', help='Enable verbose logging')
    parser.add_argument('--log-file', type=str, help='Also write diagnostics to this file')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='Run an experiment')
    run.add_argument('--config', required=True, help='Experiment configuration (YAML)')
    run.add_argument('experiment_type', choices=[t.value for t in ExperimentType], help='Experiment type')
    run.add_argument('algorithm', help='Algorithm configuration (YAML)')
    run.add_argument('--plugins', type=str, help='Directory searched for dotted algorithm names')
    run.add_argument('--log', type=str, help='Write the round log here (.json -> json, otherwise csv)')
    run.add_argument('--seed', type=int, help='Override the experiment seed')

    get = commands.add_parser('get', help='Fetch configuration templates')
    get_commands = get.add_subparsers(dest='get_command', required=True)
    get_config_cmd = get_commands.add_parser('config', help='Write a template to the template directory')
    get_config_cmd.add_argument('name', help='Template name (see `get list`)')
    get_config_cmd.add_argument('--force', action='store_true', help='Overwrite an existing file')
    get_config_cmd.add_argument('--dir', type=str, help='Destination directory')
    get_commands.add_parser('list', help='List the bundled templates')

    return parser


def run_experiment(args: argparse.Namespace, plugins_dir: Optional[str]) -> int:
    """
    Load both documents, apply CLI overrides, run and emit the round log
    """
    experiment = load_experiment_config(args.config)
    algorithm = load_algorithm_config(args.algorithm)

    if args.seed is not None:
        experiment.seed = args.seed
    if args.log:
        experiment.logger.format = LogFormat.JSON if args.log.endswith('.json') else LogFormat.CSV
        experiment.logger.path = args.log

    service = ExperimentService(experiment, algorithm, plugins_dir=args.plugins or plugins_dir)
    round_log = RoundLogService(experiment.logger.format, experiment.logger.path)
    result = service.run(ExperimentType(args.experiment_type))
    round_log.write(result)
    round_log.print_summary(result)
    return EXIT_OK


def get_templates(args: argparse.Namespace, template_dir: str) -> int:
    if args.get_command == 'list':
        for name in TemplateService.list_templates():
            print(name)
        return EXIT_OK
    TemplateService(args.dir or template_dir).get_template(args.name, force=args.force)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point; returns the process exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    error_service = ErrorService()

    try:
        config = get_config()
    except ValueError as e:
        setup_logging(level="INFO")
        error = ConfigError(str(e))
        error_service.log_error(error, "settings")
        return error_service.exit_code_for(error)

    log_level = "DEBUG" if args.verbose else config.log_level
    logger = setup_logging(level=log_level, log_file=args.log_file or config.log_file)

    try:
        if args.command == 'run':
            logger.info(f"Running {args.experiment_type} experiment: {args.config} + {args.algorithm}")
            return run_experiment(args, config.plugins_dir)
        return get_templates(args, config.template_dir)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130
    except Exception as e:
        error_service.log_error(e, args.command)
        summary = error_service.get_error_summary()
        logger.info(f"Errors: {summary['total_errors']} ({summary['error_types']})")
        return summary['last_error']['exit_code']


if __name__ == "__main__":
    sys.exit(main())
