from src.tomography.projectors import (ProjectorSet, ideal_probabilities, projectors_for, qubit_projectors,
                                      qutrit_projectors)
from src.tomography.counts import CountMismatchError, CountRecord, exact_counts, mixed_counts, simulate_counts
from src.tomography.reconstruct import (DegenerateDataError, TomographyResult, bootstrap_sigma, reconstruct,
                                        reconstruct_qubit, reconstruct_qutrit)
