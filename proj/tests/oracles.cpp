#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tubecurv::oracle {

double brute_force_w1(const std::vector<Vec>& p, const std::vector<Vec>& q) {
  const int n = static_cast<int>(p.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::max();
  do {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += (p[i] - q[perm[i]]).norm();
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / n;
}

double fd_leaf_volume_ratio(const Manifold& M, const Vec& intrinsic, const Vec& beta) {
  const int m = M.dim();
  const double h = 1e-5;
  // The disintegration pairs beta with a rotation-free normal frame field;
  // for codimension 2 curves that is the relatively parallel frame anchored
  // at the probe point, not the Frenet frame.
  const Curve* curve = dynamic_cast<const Curve*>(&M);
  auto offset_map = [&](const Vec& u, const Vec& b) {
    Vec x = M.embed(u);
    std::vector<Vec> ns = curve ? curve->chart_normal_frame(intrinsic(0), 1, u(0) - intrinsic(0))
                                : M.normal_frame(x);
    for (int j = 0; j < M.codim(); ++j) x += b(j) * ns[j];
    return x;
  };
  auto gram_sqrt = [&](const Vec& b) {
    Eigen::MatrixXd J(M.ambient_dim(), m);
    for (int i = 0; i < m; ++i) {
      Vec up = intrinsic, um = intrinsic;
      up(i) += h;
      um(i) -= h;
      J.col(i) = (offset_map(up, b) - offset_map(um, b)) / (2.0 * h);
    }
    return std::sqrt((J.transpose() * J).determinant());
  };
  return gram_sqrt(beta) / gram_sqrt(Vec::Zero(M.codim()));
}

Vec graph_geodesic_reference(double fxx, double fyy, double fxy, const Vec& start_xy,
                             const Vec& dir_xy, double t, int steps) {
  Eigen::Matrix2d hess;
  hess << fxx, fxy, fxy, fyy;
  auto accel = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& v) {
    Eigen::Vector2d g = hess * p;  // grad f
    double denom = 1.0 + g.squaredNorm();
    double vhv = v.dot(hess * v);
    return Eigen::Vector2d(-g(0) * vhv / denom, -g(1) * vhv / denom);
  };
  Eigen::Vector2d p{start_xy(0), start_xy(1)}, v{dir_xy(0), dir_xy(1)};
  double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    Eigen::Vector2d k1p = v, k1v = accel(p, v);
    Eigen::Vector2d k2p = v + 0.5 * h * k1v, k2v = accel(p + 0.5 * h * k1p, v + 0.5 * h * k1v);
    Eigen::Vector2d k3p = v + 0.5 * h * k2v, k3v = accel(p + 0.5 * h * k2p, v + 0.5 * h * k2v);
    Eigen::Vector2d k4p = v + h * k3v, k4v = accel(p + h * k3p, v + h * k3v);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  Eigen::Vector2d g = hess * p;
  Vec out(3);
  out << p(0), p(1), 0.5 * p.dot(hess * p);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const std::vector<TransportCase>& lp_reference_cases() {
  // solved externally with scipy.optimize.linprog (HiGHS), seed 20260810
  static const std::vector<TransportCase> cases = {
      {6, 3, 2,
       {0.29627120442720978, 0.86455123185761473, -0.63457942986470539, 0.55919046540500661,
        -0.56884230889137077, 0.093831880944633461, 0.038480657941647012, 0.74176852275857375,
        0.44947666028033395, -0.044946602700666416, 0.87314120305449006, 0.23384609782880528},
       {-0.94114855349486914, 0.97465585585836378, 0.62605335979776111, 0.86591910710238529,
        0.93657383482600642, -0.22552780292367536},
       {0.26525456053903468, 0.17408591237209373, 0.20934415493469033, 0.079290670544191089,
        0.078288640113726743, 0.19373606149626343},
       {0.32964502995193529, 0.31402514633194673, 0.35632982371611799},
       0.60897651760129212},
      {5, 3, 4,
       {-0.23704842321608233, -0.87370325643700375, 0.89476482183916173, 0.54327827363374959,
        0.95046347809564335, 0.32168298133238804, -0.10990035442475032, -0.93428870530636354,
        -0.7658414498579591, -0.71390302631004343, -0.17248685597361169, -0.44923507250426442,
        -0.36711606678516495, 0.82182660033386146, 0.10844904070321992, -0.7329936163894899,
        0.17704789468335069, 0.070652049337900591, -0.50830213631193311, 0.4152281105870177},
       {0.13246321920516002, -0.49794016887423198, -0.25223866631872105, 0.48460325030205365,
        -0.0033020859985755102, 0.41667025672759284, -0.55043589746291066, 0.74214039600989268,
        0.8705195382532418, -0.046781156292061032, 0.20646381808444425, -0.03702352277171328},
       {0.27569092982958004, 0.1193372673195056, 0.36506677070966831, 0.13925899388319454,
        0.10064603825805148},
       {0.40463777812312768, 0.24494433208941144, 0.35041788978746091},
       1.3316479783694122},
      {4, 6, 3,
       {-0.10933083526202725, 0.28096068714122824, 0.99742905123953807, 0.5817745111000332,
        0.57079836360985081, 0.65114020847833287, -0.47770848133047505, -0.23167376878248769,
        0.64284511211934947, -0.10826062034381567, 0.97820070863598296, 0.44112645709027665},
       {-0.91869604984182818, -0.91292265905427827, -0.43888974239352696, -0.20773926917850072,
        -0.091102454911482056, -0.95424572189215118, -0.75812336633909982, 0.96900402617708825,
        -0.50992768342457229, 0.46972048243918363, -0.67741505444237893, -0.76789383451308635,
        -0.039074403624946852, -0.28559082009968773, 0.26851188963032002, 0.15515565883724913,
        -0.73993746990883547, -0.95232312873923863},
       {0.20084554174845051, 0.24522162337500172, 0.28104660837411899, 0.27288622650242872},
       {0.15817556907652927, 0.21706744081163926, 0.16708979245054098, 0.067989749069634411,
        0.22742005145527092, 0.16225739713638518},
       1.4468071207492392},
      {2, 2, 2,
       {-0.38780173772812176, -0.44004727460821425, 0.39194559258036787, -0.19804558488280488},
       {-0.55473565339155972, 0.94797415426697906, 0.23756436574805018, 0.25565187583198457},
       {0.25324953005673229, 0.74675046994326777},
       {0.51751268505344061, 0.48248731494655933},
       0.97809498096004199},
      {4, 2, 4,
       {0.47989383050707213, -0.11771223597109093, -0.15066236881373696, 0.88080551648014005,
        -0.85404087845660892, -0.43768067589824411, -0.16380406700087136, 0.49412866200311534,
        -0.75037080713145987, -0.12139118072431798, -0.86881921349847602, 0.11702943710491209,
        -0.0061208192749888646, 0.53873386024169112, 0.63059687022035482, -0.96097284516955783},
       {0.93839794312345925, 0.95418979294800121, 0.42314222775477406, -0.089217893567073325,
        0.69355795465734849, 0.20807504467062077, -0.7866250296388444, 0.49280449149391115},
       {0.26451642612845799, 0.27337762160116935, 0.24204826514617434, 0.22005768712419826},
       {0.23078555175207369, 0.76921444824792629},
       1.3892507618716816},
      {3, 6, 2,
       {-0.99126812852470669, -0.88108763004687884, -0.96775311158015587, -0.047544293165877383,
        -0.36643560752349758, -0.17395588285223185},
       {0.43156168501049619, -0.78077136458925067, 0.64794247420428386, 0.88008511967909775,
        -0.88200792218438417, 0.78627018830266482, -0.61872080009750374, -0.48568917655339527,
        0.13246051380509671, -0.4935327540429022, -0.72978293559335472, 0.30739788328055218},
       {0.54860003339719032, 0.29585687869470023, 0.1555430879081095},
       {0.23109090125632467, 0.22938986680705525, 0.15115405165331097, 0.072693590661117691,
        0.22977694561440362, 0.085894644007787777},
       1.1789306441343512},
      {6, 6, 4,
       {0.39463610760501178, 0.054448555278904465, -0.65839375347610485, 0.10423783077756177,
        0.65375486111958869, 0.88737561922630559, 0.96181495540766648, -0.16057249503173554,
        -0.86143647053975902, 0.98348958642880602, 0.11204636670329648, -0.22656416598766449,
        0.21759610043917954, -0.72910717191437469, -0.35207423694887852, -0.56433358907657749,
        -0.28687912234721646, -0.36174214560647222, -0.015294145599350495, -0.8203082599528837,
        0.80583149227290995, 0.71065485955208119, -0.19420979397372928, -0.74398580823228055},
       {-0.52017048959112833, 0.71640780513899305, -0.18330512879949423, -0.35461745990580873,
        0.12518573940728728, 0.016062649352730274, -0.02075396537674723, -0.56703237652155214,
        0.0098903311279863182, 0.33748815800290699, 0.36562934132917113, 0.69959542044383305,
        0.89488064769459807, -0.74560522705200838, 0.14693467226343038, -0.6290035648235055,
        0.65682460271821896, 0.90943558416537029, 0.39971280884289895, -0.25525702509410753,
        0.4025463964365612, 0.62806419013356707, -0.82169644280290854, -0.76850173509348974},
       {0.10285638270014967, 0.11899856688426573, 0.18836596031881359, 0.088778130681050629,
        0.21786692356282408, 0.28313403585289626},
       {0.20254323750142406, 0.1549895174339905, 0.2079923575121658, 0.18658872379874053,
        0.10601377610780584, 0.14187238764587337},
       0.88534892020417122},
      {5, 2, 4,
       {0.15907129026896016, -0.55860580395721748, 0.51122608994655083, 0.54250679565416715,
        0.41855957999381244, 0.80818846005411671, -0.49459488484728187, -0.61990613082747981,
        -0.94559241250213955, -0.87736672621160183, 0.13897179764154122, 0.7507670121630805,
        -0.25408051498249073, -0.11518182735540705, 0.28918790864685606, -0.2918852489524959,
        -0.1480755339813129, -0.99313807326806236, 0.40079090871486422, -0.17032466703221871},
       {0.73839434756113675, 0.13854242811843553, -0.33910485966660486, -0.8038483707437023,
        0.058962617014073571, 0.033427181367404746, -0.90109575769909522, -0.92118677550808759},
       {0.086754368259619047, 0.17016534762538682, 0.32772704113178147, 0.11520499048843819,
        0.30014825249477445},
       {0.45543105182454513, 0.54456894817545487},
       1.7663027938255826},
  };
  return cases;
}

}  // namespace tubecurv::oracle
