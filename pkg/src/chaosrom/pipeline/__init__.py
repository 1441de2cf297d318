"""Experiment plumbing: persistence format, JSON config, orchestration
steps, plots, and the command-line interface.

Submodules are imported explicitly (chaosrom.pipeline.container and so
on); nothing heavy is pulled in at package-import time so the CLI can
pin BLAS thread counts before numpy loads.
"""
