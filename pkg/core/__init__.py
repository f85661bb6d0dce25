"""Core system modules: config, context, errors, events, logging, orchestration."""
