"""Protocol state machines: forwarding, planarization, relaying."""
from coopgeo.protocol.config import ProtocolConfig
from coopgeo.protocol.frames import (DeliveryReport, Frame, FrameKind, HopMode,
                                     HopOutcome, PlanarNeighborhood, RouteMode,
                                     RoutingFailure, RoutingState)
from coopgeo.protocol.hop import (CbfRound, CbrRound, Reception,
                                  detect_local_optimum, run_cbf_round,
                                  run_cbr_round, run_hop, run_route)
from coopgeo.protocol.planar import face_route_step, run_bfp

__all__ = [
    "CbfRound", "CbrRound", "DeliveryReport", "Frame", "FrameKind", "HopMode",
    "HopOutcome", "PlanarNeighborhood", "ProtocolConfig", "Reception",
    "RouteMode", "RoutingFailure", "RoutingState", "detect_local_optimum",
    "face_route_step", "run_bfp", "run_cbf_round", "run_cbr_round", "run_hop",
    "run_route",
]
