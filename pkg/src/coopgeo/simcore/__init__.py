"""Topologies, the event engine and Monte-Carlo replication.

The experiment runner lives in :mod:`coopgeo.simcore.experiment`; it is not
imported here because it depends on the protocol package, which in turn uses
the engine and topology modules.
"""
from coopgeo.simcore.engine import Event, EventQueue
from coopgeo.simcore.topology import (Topology, gen_area_topology,
                                      gen_per_hop_topology)

__all__ = ["Event", "EventQueue", "Topology", "gen_area_topology",
           "gen_per_hop_topology"]
