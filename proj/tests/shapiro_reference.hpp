#pragma once

// Shapiro-Wilk W and p recorded with scipy.stats.shapiro (scipy 1.15.3,
// AS R94) for fixed vectors drawn once from numpy RandomState(20240611).

#include <vector>

struct ShapiroReference {
  const char* name;
  std::vector<double> x;
  double w;
  double p;
};

inline const std::vector<ShapiroReference> kShapiroReference = {
    {"normal10",
     {-1.485371, 0.161838, -0.773996, 0.732992, -1.093631, -1.160433, 0.002692, 0.587597,
       -0.544956, 1.909759},
     0.9484212280233865,
     0.6498589084949433},
    {"uniform10",
     {0.52931, 0.760448, 0.849972, 0.275161, 0.032865, 0.237984, 0.584645, 0.668841,
       0.745943, 0.379722},
     0.9506858156165886,
     0.6766195601733593},
    {"expon10",
     {0.677317, 2.492532, 0.366511, 0.229458, 1.089276, 0.606531, 0.011683, 0.417884,
       0.636952, 0.486767},
     0.755592947371166,
     0.004174721030707311},
    {"normal20",
     {0.758265, 0.311898, 1.9927, -0.308287, -0.120387, 0.87665, 0.30099, -1.274685,
       -0.108215, -0.682917, 0.907057, 1.286168, 0.868388, -1.322413, 1.384037, -0.725278,
       -0.198351, 0.419299, -0.824955, 1.287799},
     0.9699890077439506,
     0.7546420175284254},
    {"lognormal20",
     {0.103441, 2.236221, 2.117459, 1.446992, 0.235499, 0.465838, 2.329776, 6.762266,
       0.19, 1.261244, 0.547863, 0.333296, 2.063736, 0.404436, 0.457278, 0.773566,
       0.276099, 0.465713, 0.48834, 1.203078},
     0.6557566635405638,
     1.1799821824014172e-05},
    {"outlier20",
     {-0.025946, -1.531163, 0.441222, 0.786914, 1.710245, -1.147532, 0.400094, 6.0,
       0.555981, 0.228338, 1.531639, -2.352728, 2.87987, 0.933114, -0.723857, -0.004115,
       0.881548, 0.508398, -0.86646, -0.45287},
     0.8816988760279784,
     0.01898443724253558},
    {"t3_20",
     {0.214205, -1.118227, 2.172218, 3.345591, 0.835347, 0.563622, -0.03139, -0.153209,
       0.161534, -1.142229, 0.160612, -0.833007, -0.803109, -0.6492, -0.496106, -0.676549,
       0.82516, 0.379143, 0.614894, 0.225849},
     0.8751733449080421,
     0.014503221099759772},
    {"normal50",
     {0.562812, 0.389869, -0.185395, 0.772286, 0.467153, -0.615064, 0.391335, 0.071187,
       -0.891553, -0.155629, -0.080765, -0.849699, 1.109998, 1.431494, -1.116962, -0.408486,
       0.125892, 2.093679, 0.484137, 0.519012, 0.936858, 0.41586, 0.183283, -2.497741,
       0.68042, -0.616355, 1.057456, 0.490288, -0.105785, 0.313663, 1.05121, -0.597057,
       1.385985, 0.160945, -0.357688, -1.080367, -1.12062, 1.042782, -0.011598, 1.370112,
       -0.096458, 0.830556, 1.837224, -0.97128, 0.562131, -0.860926, -0.26451, -0.80984,
       -1.011825, -0.553923},
     0.983629192706842,
     0.7114572202689555},
    {"uniform50",
     {0.382713, 0.362324, 0.537218, 0.975916, 0.508223, 0.307916, 0.205441, 0.791542,
       0.729064, 0.518194, 0.83527, 0.071186, 0.140824, 0.23082, 0.658033, 0.150921,
       0.374502, 0.755591, 0.779748, 0.647692, 0.76332, 0.971371, 0.432392, 0.634387,
       0.636998, 0.726831, 0.756697, 0.559916, 0.544279, 0.872514, 0.813473, 0.278044,
       0.617772, 0.058182, 0.594928, 0.247766, 0.781312, 0.394692, 0.585364, 0.842275,
       0.166335, 0.365976, 0.33651, 0.992016, 0.785897, 0.195495, 0.288977, 0.639457,
       0.615971, 0.692183},
     0.9619677227622121,
     0.10748333605099042},
    {"gamma50",
     {4.377327, 1.024098, 0.813293, 1.968502, 1.658709, 0.661009, 0.520377, 2.782337,
       5.829042, 1.274701, 3.024281, 2.429054, 2.099137, 0.734829, 1.276035, 1.76003,
       2.196005, 0.610754, 0.457786, 5.130666, 1.033127, 1.021519, 0.81479, 3.504613,
       3.353205, 0.365564, 1.31062, 2.447099, 1.757756, 4.614477, 0.604225, 2.064938,
       0.701721, 2.209174, 3.671759, 2.934909, 0.538805, 2.192685, 0.209508, 0.425084,
       1.903282, 2.731664, 0.152728, 1.130071, 1.382788, 1.821896, 3.113218, 2.38512,
       1.395133, 1.814603},
     0.9196037992559004,
     0.0022815090279076963},
};
