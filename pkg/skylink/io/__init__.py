from .config_file import parse_config, config_from_dict, dump_config
from .outputs import emit_outputs, write_csv, append_csv, read_csv, ue_results_frame, layout_frames, links_frame
from .manifest import RunManifest, write_manifest, load_manifest
