"""horomonica: a musical instrument built on the Farey tessellation.

Tones are integer lambda lengths of tessellation edges, tuning is done by
Ptolemy flips, quotient surfaces give equivariant playing modes, and scores
render to WAV.
"""

from .farey import (
    ZERO,
    ONE,
    INFINITY,
    ExtendedRational,
    MoebiusMap,
    Horocycle,
    DiskPoint,
    GeodesicArc,
    lambda_length,
    lambda_length_sq,
    lambda_length_general,
    mediant,
    generation,
    cayley,
    geodesic_arc,
    horocycle_circle,
    orient_edge,
)
from .tessellation import (
    EdgeKey,
    TriangleKey,
    FlipRecord,
    TessellationPatch,
    TuningScriptError,
    new_patch,
    viewport_json,
    viewport_svg,
)
from .chords import (
    chord_obstruction,
    is_chord,
    realize_chord,
    brute_force_realize,
    bezout_witness,
    markoff_children,
    markoff_tree,
)
from .surfaces import (
    CosetTable,
    SurfaceType,
    QuotientTriangulation,
    LiftedPatch,
    builtin_group,
    load_coset_table,
    classify,
    quotient_triangulation,
    flip_script,
    develop,
)
from .audio import (
    Tempering,
    EQUAL,
    pythagorean,
    freq_of_lambda,
    fret_frequency,
    hold_frequency,
    NoteEvent,
    Score,
    SynthConfig,
    tap_event,
    triangle_event,
    arpeggio,
    compile_melody,
    render_samples,
    render_wav,
)
from .session import (
    Session,
    SessionConfig,
    ProtocolError,
    save_session,
    load_session,
    replay_session,
    make_server,
    serve,
)
from .cli import run_command

__version__ = "0.1.0"
