#pragma once

// Generated by tests/oracles/freeze_reference_values.py (scipy 1.15.3). Do not edit.

#include <array>
#include <vector>

namespace ref {

struct FPoint { double x; int d1; int d2; double cdf; };

inline const std::array<FPoint, 21> kFPoints = {{
    {16.0, 1, 4, 0.9838699100999074},
    {0.5, 1, 1, 0.39182655203060734},
    {1.0, 1, 10, 0.6591068676979402},
    {3.84, 1, 36, 0.9421786369110763},
    {4.2, 1, 76, 0.9561250520142375},
    {2.5, 3, 7, 0.8564905437210608},
    {0.1, 5, 5, 0.01224191653106973},
    {7.5, 2, 30, 0.9977163417394789},
    {1.7, 10, 20, 0.8500657387627305},
    {0.9, 12, 15, 0.4333236371844576},
    {5.0, 4, 200, 0.9992677459577214},
    {1.05, 200, 200, 0.6347838443927898},
    {0.75, 150, 3, 0.2657403482085695},
    {12.0, 6, 6, 0.995957370594113},
    {50.0, 1, 2, 0.9805806756909201},
    {0.01, 1, 100, 0.07945546890414877},
    {2.0, 20, 1, 0.4876580950513755},
    {3.3, 8, 40, 0.9944962540484135},
    {1.2, 50, 60, 0.751691282341033},
    {0.3, 2, 199, 0.25884733236541907},
    {9.0, 3, 12, 0.9978653283751373},
}};

struct SwVector { double w; double p; std::vector<double> values; };

inline const std::vector<SwVector> kShapiro = {
    {0.9474929664332613, 0.7192711567844938, {3.5183, 3.3755, 2.4856, 2.0574, 2.8842}},
    {0.9798274810738549, 0.9336934690646311, {1.4549, 1.877, 0.6885, 1.3917, 2.3599}},
    {0.8842451822332951, 0.32899265183003773, {2.4442, 1.5926, 3.9925, 4.8946, 4.8145}},
    {0.9779200777558862, 0.9045063502012705, {2.7083, 2.664, 3.55, 1.4807, 2.8469, 4.337, 2.2638, 2.3932, 2.9326, 1.8657, 2.8963, 2.9875, 2.9963, 2.2092, 2.7073, 3.5231, 2.4284, 3.4378, 3.5244, 1.8584}},
    {0.7467287057105991, 0.00015350451885898938, {0.3693, 0.4033, 0.2068, 0.9183, 3.5193, 2.5867, 0.1172, 0.3379, 0.4553, 1.2474, 0.8029, 0.2422, 1.3001, 1.1887, 0.445, 3.253, 0.0422, 0.54, 0.4536, 0.3258}},
    {0.933582682647395, 0.18093899134659325, {2.7315, 4.9726, 3.4333, 2.551, 3.8403, 4.2273, 4.7282, 2.4958, 4.8881, 4.4648, 4.8762, 3.9909, 1.6958, 3.7468, 4.4812, 2.6536, 4.6045, 4.1185, 3.4522, 3.4537}},
    {0.9820047827715731, 0.6390372156565066, {3.7052, 1.5615, 1.6368, 2.4579, 3.0273, 1.8889, 2.2503, 2.6439, 2.6199, 3.1509, 3.0581, 2.969, 2.5058, 2.3341, 1.4713, 4.014, 3.1564, 3.2956, 1.6261, 3.6009, 2.9296, 3.7747, 2.4511, 3.7987, 4.1515, 2.8644, 2.7564, 2.6798, 3.1085, 5.192, 2.962, 3.5205, 1.814, 1.1378, 3.1285, 2.9211, 3.9753, 1.1333, 3.3329, 1.5973, 4.4063, 3.6086, 2.2183, 3.5838, 3.7128, 3.0943, 4.2352, 3.7794, 2.9369, 2.6521}},
    {0.7545029447174912, 9.089263924761951e-08, {0.7577, 0.5666, 1.6641, 0.7726, 0.651, 1.0288, 0.3459, 2.0161, 2.9648, 1.8873, 0.4953, 0.4478, 0.7756, 0.2079, 0.9574, 0.7476, 0.1357, 0.6673, 0.218, 2.0742, 1.4975, 0.187, 4.9828, 0.1683, 0.489, 0.2793, 0.4737, 0.5593, 0.5172, 1.208, 1.9432, 0.185, 0.0788, 0.8233, 0.5662, 1.231, 0.0375, 0.2429, 0.6414, 0.0001, 0.7083, 0.2183, 1.4957, 1.4925, 0.1054, 0.8276, 0.1731, 0.7126, 0.2776, 1.0378}},
    {0.9590313087719706, 0.08096143694792814, {4.3349, 1.171, 2.4407, 4.1045, 2.8241, 1.9274, 3.9662, 3.1958, 1.4625, 2.3751, 4.1819, 2.5091, 4.3919, 2.5038, 2.5719, 3.0121, 1.5238, 1.6882, 2.7111, 4.7007, 3.5752, 2.8593, 3.6439, 1.2159, 3.503, 2.4096, 1.5882, 2.7589, 3.0958, 1.8312, 4.8415, 2.0775, 1.4086, 3.7992, 3.2788, 4.886, 4.1315, 4.2421, 2.2147, 1.046, 4.0883, 4.1871, 4.8991, 2.0034, 1.8219, 3.2399, 4.6197, 2.1169, 2.6469, 2.8691}},
    {0.7118106695654127, 1.3566963176932664e-08, {0.4694, -1.2857, 0.9312, 0.2002, -1.6476, 0.4619, -0.4093, 0.4465, 0.7926, 0.2875, 0.4407, 0.332, -0.6574, -0.6818, -0.06, -0.0157, 1.1858, -1.1258, -1.0504, 0.6903, -0.1282, 0.7943, 0.1255, -0.7385, -1.5043, -0.8727, 1.0413, -0.8158, 0.5959, 0.823, -0.3832, 1.6036, -0.4469, -1.3091, 0.1453, -0.007, 0.5708, -1.6677, -0.4057, -1.8855, 0.5723, -0.4831, 2.0424, -0.0122, 0.3368, 6.0, 6.5, 7.0, 7.5, 8.0}},
};

inline const SwVector kProgression = {0.9603595713015569, 0.551057650843322, {1.001, 1.999, 3.001, 3.999, 5.001, 5.999, 7.001, 7.999, 9.001, 9.999, 11.001, 11.999, 13.001, 13.999, 15.001, 15.999, 17.001, 17.999, 19.001, 19.999}};

inline const SwVector kOutlier = {0.23587389697721584, 2.6930778843226267e-09, {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 10.0}};

}  // namespace ref
