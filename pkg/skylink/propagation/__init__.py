from .geometry import (CellGeometry, Deployment, LinkGeometry, build_hex_layout, compute_tilt,
                       footprint_radius, link_geometry, deployment_link_geometry)
from .antenna import (ReflectorAntenna, SectorAntenna, ElementPattern, reflector_gain,
                      tn_element_gain, tn_beam_gain)
from .los import LosGeometryParams, GeometricLosModel, los_probability
from .channel import (LargeScaleState, NtnPathlossBreakdown, FadingState, tn_pathloss, ntn_pathloss,
                      shadowing_sample, rician_fade, compose_large_scale)
