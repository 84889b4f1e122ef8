#pragma once

// Generated by tests/oracles/generate.py (mpmath, 40 digits). Do not edit.

namespace oracle {

inline constexpr double kHermite[] = {34.49824000000000341, -66123.413033062409421, 5027779307352.6602148, 1.0};
inline constexpr double kKummerArgs[] = {-3.72, 0.5, 0.5, 1.5, 2.5, -10.0, 0.3, 1.2, 30.0, -2.0, 0.5, 3.0, -4.22, 1.5, 0.5, 2.0, 3.0, -40.0};
inline constexpr double kKummer[] = {-1.2219698404890397717, 0.042030298586532038368, 157037339163.0520083, 1.0, 0.000013209245122317634662, 0.0012499999999999997823};
inline constexpr double kPhi3[] = {0.18416464599422518998, 0.23344264258943887509, 0.0002847790762410606801};
inline constexpr double kDrift3[] = {1.5029850746268654696, -1.3342784595852732197, -3.1982758620689655172};
inline constexpr double kNodes4[] = {-1.6506801238857845559, -0.52464762327529031788, 0.52464762327529031788, 1.6506801238857845559};
inline constexpr double kInnerOdd[] = {7.4402028921912668186, 37.058603971722656212, 86.408378115661949058};
inline constexpr double kInnerEven[] = {19.784328829340075998, 59.266350311825713866, 118.48496309370195499};
inline constexpr double kOuter[] = {2.4011316014715605797, 4.7004817654964642204, 6.949742742660945489};
inline constexpr double kOuterCut8[] = {2.4011317238379826244, 4.7004978882399387273, 6.9504664309274486586};
inline constexpr double kHalfLineCut8[] = {2.0000000028333529066, 4.0000004200792119549, 6.0000248990279551433};
inline constexpr double kKernelPts[] = {0.3, 0.5, 1.0, -1.1, 2.0, 0.4, 2.0, 0.05, 1.9, 0.01, 1.0, 0.7, 1.5, 8.0, 0.2};
inline constexpr double kOU[] = {0.61160321066928441848, 0.14660698387074037451, 1.2381963383590196916, 0.56523648165387389206, 0.059477102837047270045};
inline constexpr double kExcited[] = {0.2068595050521253173, 0.0, 1.3701894970057527645, 0.00025993105101374671683, 0.53518625754040706703};
inline constexpr double kVcPts[] = {0.3, 0.5, 1.2, 1.0, -0.7, 2.0, 0.9, 0.2};
inline constexpr double kVcOU[] = {0.040861241081611572811, 0.37715971453147394329, 0.43290255182422719138, 0.14733386730832385229};
inline constexpr double kVcExcitedPts[] = {0.3, 0.5, 1.2, 1.0, 0.7, 2.0, 2.0, 0.05};
inline constexpr double kVcExcited[] = {-0.52555099555371071664, 0.79515996241578036718, 0.2366830571383792007, 44.562749547710132493};
inline constexpr double kVcDecay[] = {0.80903555981794502372, 0.24730650761363322621, 0.24507490530224559503, -0.90865934725723688103};
inline constexpr double kCoherentPts[] = {0.4, 0.3, -1.0, 1.2, 1.5, 2.5};
inline constexpr double kCoherentMean[] = {0.64666736799372490202, 0.06413261047805717623, -0.24333163068104460576};
inline constexpr double kVcCoherent[] = {0.15056059972981923446, 1.4416810107261561491, 2.0819207442008307785};
inline constexpr double kSwitchW[] = {2.3379250957233497919, 0.71976972054500570589, -0.22555875430161681746};
inline constexpr double kSqueezeT[] = {-6, -1, 0, 0.5, 6};
inline constexpr double kSqueezeOmega[] = {0.0024604255860807279241, 0.15494169386417576939, 0.16666666666666666667, 0.14484413117924682208, 0.0012347812199989975387};
inline constexpr double kSqueezeDelta[] = {11.940876419997107994, 1.2420722172219709186, 0.0, -0.37988518846440518102, -3.0074316483777949434};
inline constexpr double kSqueezeOmega2[] = {0.98772208680810951065, 0.31408463308911212465, 0.1975308641975308642, 0.17978778728008515513, 0.064038710475947969983};
inline constexpr double kSqueezeC[] = {0.05875927572797785744, 0.38489754647600928977, 0.0, -0.11004828014198241133, -0.0074270402396950596544};

}  // namespace oracle
