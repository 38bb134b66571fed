from .association import AssociationMap, compute_rsrp, associate
from .sinr import sinr_ntn_per_prb, sinr_tn_per_prb, effective_sinr
from .rate import UeResult, ue_rate, spectral_efficiency
