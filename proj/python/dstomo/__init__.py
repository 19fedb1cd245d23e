"""Single-plane tetrahedron (SIC-POVM) tomography of double-slit qubits.

Thin wrapper over the C++ core. The main entry points are
``reference_design``, ``search_tetrahedra``, ``build_povm``,
``simulate_counts`` and the reconstruction helpers.
"""

from ._core import (  # noqa: F401
    CountRecord,
    Design,
    DetectorLayout,
    PhysicalGeometry,
    Povm4,
    PovmElement,
    TetraSolution,
    __version__,
    balanced_delta,
    bin_counts,
    bloch_of_w,
    build_povm,
    canonicalize,
    detection_pdf,
    detector_positions,
    fidelity,
    from_physical,
    gram_max_error,
    ideal_probabilities,
    intensity_envelope,
    is_reflection_symmetric,
    linear_invert,
    make_layout,
    mle_reconstruct,
    mode_overlap,
    objective_gradient,
    project_physical,
    projector_of,
    propagate_mode,
    reference_design,
    refine_solution,
    sample_positions,
    search_tetrahedra,
    simulate_counts,
    slit_mode,
    tetra_objective,
    to_physical,
    trace_distance,
    w_of,
)
