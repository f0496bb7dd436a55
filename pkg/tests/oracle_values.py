"""Frozen oracle values.

MC_CASES: sphere means of log|f| over |x| = rho from an independent Monte-Carlo
estimate (10^7 uniform samples, direct Hamilton-product evaluation, seed 12345).
The functions were drawn once from a seeded generator and are stored literally.
"""

MC_SAMPLES = 10_000_000

MC_CASES = [
    {"name": "factored_0", "rho": 1.341,
     "spec": {"kind": "slice_preserving_factored", "real_factors": [[-0.512381, 1]], "sphere_factors": [[[-0.223589, 0.376562, 0.0, 0.0], -1], [[0.841948, 1.652273, 0.0, 0.0], 1]], "tail": [1.0046, -0.014]},
     "mean": 0.8546869109640982, "stderr": 0.0001578779178163216},
    {"name": "factored_1", "rho": 1.58,
     "spec": {"kind": "slice_preserving_factored", "real_factors": [[-1.184323, 2]], "sphere_factors": [[[-0.504564, 1.180385, 0.0, 0.0], -1], [[-1.262063, 1.486203, 0.0, 0.0], 1]], "tail": [1.0709, -0.0131]},
     "mean": 1.8596690245352347, "stderr": 0.000301488159760023},
    {"name": "factored_2", "rho": 1.011,
     "spec": {"kind": "slice_preserving_factored", "real_factors": [[-0.368751, -1]], "sphere_factors": [[[0.08715, 0.833331, 0.0, 0.0], 1], [[0.814289, 1.013343, 0.0, 0.0], 1]], "tail": [1.8339, -0.0605]},
     "mean": 0.7078886012580645, "stderr": 0.00034539936857558285},
    {"name": "factored_3", "rho": 1.345,
     "spec": {"kind": "slice_preserving_factored", "real_factors": [[-0.432099, 1]], "sphere_factors": [[[-0.395616, 0.314897, 0.0, 0.0], 1], [[1.127822, 1.427438, 0.0, 0.0], 1]], "tail": [1.5854, -0.0319]},
     "mean": 2.525419674126804, "stderr": 6.529515752119229e-05},
    {"name": "pql_0", "rho": 1.123,
     "spec": {"kind": "pql", "a": [[0.998455, 0.05012, 0.272288, 0.335439], [-0.357888, -0.919441, -0.089826, -0.393001], [0.089381, 0.11279, 0.068356, 0.579043]], "q": [[-0.401954, -0.331908, -0.352702, -0.236907], [-0.935891, 1.036722, 0.488125, 0.163357]], "M": [1, 1]},
     "mean": 0.38483305150259345, "stderr": 0.00012258003504525767},
    {"name": "pql_1", "rho": 1.024,
     "spec": {"kind": "pql", "a": [[-0.13375, 0.597496, -0.636942, -0.005736], [0.231506, -0.79345, -0.231155, -0.740814], [0.59566, 0.500095, -0.602015, 0.565328], [0.215064, 0.013393, -0.946585, -0.432555]], "q": [[0.535773, -0.06441, 0.218441, -0.441259], [0.168366, -0.517548, -0.270945, 0.164946], [0.695016, -0.088582, -1.270718, 0.588783]], "M": [1, -1, 1]},
     "mean": 0.7766986587120024, "stderr": 0.00012316439508126343},
    {"name": "pql_2", "rho": 0.963,
     "spec": {"kind": "pql", "a": [[-0.196189, 0.15311, 0.629712, 0.245159], [0.343347, -0.367257, -0.050796, -0.035095], [-0.321539, 0.342686, 0.418271, -0.85574]], "q": [[-0.120595, 0.017121, -0.006877, 0.135002], [-0.242129, 0.063576, -1.5908, -0.443714]], "M": [1, -1]},
     "mean": -1.573053703870772, "stderr": 9.134346613019969e-05},
    {"name": "pql_3", "rho": 1.544,
     "spec": {"kind": "pql", "a": [[-0.960089, -0.456603, -0.176268, 0.231536], [0.010678, -1.169514, 0.391478, -0.101273], [-1.008953, -0.470641, 0.167277, -0.335337], [-0.395669, 0.25856, 0.989392, 0.814861]], "q": [[0.54681, 0.292302, -0.067576, 1.029313], [0.014744, 0.113566, 1.101691, 0.646446], [0.305982, 0.800118, 0.211099, -2.169246]], "M": [1, -1, -1]},
     "mean": -0.19671456336576393, "stderr": 0.00016921720357251054},
    {"name": "mixed_0", "rho": 1.1,
     "spec": {"kind": "mixed", "parts": [{"kind": "pql", "a": [[0.102092, -0.868152, -0.082534, -0.448537], [-0.785659, -0.619961, -0.682837, -0.82627]], "q": [[0.081147, -0.436635, -0.762842, -0.126594]], "M": [-1]}, {"kind": "slice_preserving_factored", "sphere_factors": [[[-0.265848, 0.438774, 0.0, 0.0], 1]], "real_factors": [[0.64501, 1]]}]},
     "mean": 0.43081232706736083, "stderr": 0.00011191314315539513},
    {"name": "mixed_1", "rho": 1.318,
     "spec": {"kind": "mixed", "parts": [{"kind": "slice_preserving_factored", "sphere_factors": [[[-0.159516, 0.345559, 0.0, 0.0], -1]], "real_factors": [[-0.89099, 1]]}, {"kind": "pql", "a": [[0.425761, 0.856305, -0.559286, 0.352982], [0.77993, -0.287753, 0.197938, -0.400607]], "q": [[0.288317, -0.062045, 0.05162, 0.206193]], "M": [1]}]},
     "mean": 0.25324750381140954, "stderr": 5.243117524091858e-05},
]
