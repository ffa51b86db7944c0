#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "pcd/error.hpp"
#include "pcd/geometry.hpp"
#include "pcd/null_moments.hpp"

namespace pcd {

enum class AltKind { segregation, association };

// Alternative hypothesis: corner depth eps in (0, sqrt3/3) of the standard triangle.
struct AltSpec {
  AltKind kind = AltKind::segregation;
  double eps = 0.0;
};

inline constexpr double kEpsMax = kSqrt3 / 3.0;

inline void validate_eps(double eps, bool allow_zero = false) {
  const bool ok = std::isfinite(eps) && (allow_zero ? eps >= 0.0 : eps > 0.0) && eps < kEpsMax;
  if (!ok)
    throw DomainError("eps must lie in " + std::string(allow_zero ? "[0" : "(0") + ", sqrt3/3), got " +
                      std::to_string(eps));
}

inline void validate(const AltSpec& spec) { validate_eps(spec.eps); }

inline const char* to_string(AltKind k) { return k == AltKind::segregation ? "segregation" : "association"; }

namespace detail {

template <typename T>
constexpr T sqrt3() {
  return std::numbers::sqrt3_v<T>;
}

template <typename T>
T ipow(T x, int k) {
  T p = 1;
  for (int i = 0; i < k; ++i) p *= x;
  return p;
}

template <typename T>
T seg_den(T e) {
  return ipow(2 * e + 1, 2) * ipow(2 * e - 1, 2);
}

template <typename T>
T assoc_den(T e) {
  return ipow(6 * e + sqrt3<T>(), 2) * ipow(6 * e - sqrt3<T>(), 2);
}

// Mean pieces in (r, eps), named s<eps regime><r interval> for segregation and
// a<eps regime><r interval> for association.

template <typename T>
T s11(T r, T e) {
  const T d1 = seg_den(e);
  return -(576 * ipow(r, 2) * ipow(e, 4) - 1152 * ipow(e, 4) - 37 * ipow(r, 2) + 288 * ipow(e, 2)) /
         (216 * d1);
}

template <typename T>
T s12(T r, T e) {
  const T s3 = sqrt3<T>();
  const T d1 = seg_den(e);
  return -(576 * ipow(r, 4) * ipow(e, 4) - 1152 * ipow(r, 2) * ipow(e, 4) + 91 * ipow(r, 4) +
           512 * s3 * ipow(r, 3) * e + 2592 * ipow(r, 2) * ipow(e, 2) + 1536 * s3 * r * ipow(e, 3) +
           1152 * ipow(e, 4) - 768 * ipow(r, 3) - 2304 * s3 * ipow(r, 2) * e - 6912 * r * ipow(e, 2) -
           2304 * s3 * ipow(e, 3) + 1728 * ipow(r, 2) + 3456 * s3 * r * e + 5184 * ipow(e, 2) - 1728 * r -
           1728 * s3 * e + 648) /
         (216 * ipow(r, 2) * d1);
}

template <typename T>
T s13(T r, T e) {
  const T s3 = sqrt3<T>();
  const T d1 = seg_den(e);
  return -(192 * ipow(r, 4) * ipow(e, 4) - 384 * ipow(r, 2) * ipow(e, 4) + 9 * ipow(r, 4) +
           864 * ipow(r, 2) * ipow(e, 2) + 512 * s3 * r * ipow(e, 3) + 384 * ipow(e, 4) -
           2304 * r * ipow(e, 2) - 768 * s3 * ipow(e, 3) - 288 * ipow(r, 2) + 1728 * ipow(e, 2) + 576 * r -
           324) /
         (72 * ipow(r, 2) * d1);
}

template <typename T>
T s14(T r, T e) {
  const T s3 = sqrt3<T>();
  const T d1 = seg_den(e);
  return -(192 * ipow(r, 4) * ipow(e, 4) - 384 * ipow(r, 2) * ipow(e, 4) - 9 * ipow(r, 4) -
           96 * s3 * ipow(r, 3) * e + 288 * ipow(r, 2) * ipow(e, 2) - 128 * ipow(e, 4) + 144 * ipow(r, 3) +
           576 * s3 * ipow(r, 2) * e + 256 * s3 * ipow(e, 3) - 720 * ipow(r, 2) - 1152 * s3 * r * e -
           576 * ipow(e, 2) + 1152 * r + 768 * s3 * e - 612) /
         (72 * ipow(r, 2) * d1);
}

template <typename T>
T s15(T r, T e) {
  const T s3 = sqrt3<T>();
  const T d1 = seg_den(e);
  return -(48 * ipow(r, 4) * ipow(e, 4) - 96 * ipow(r, 2) * ipow(e, 4) + 72 * ipow(r, 2) * ipow(e, 2) -
           32 * ipow(e, 4) + 64 * s3 * ipow(e, 3) - 18 * ipow(r, 2) - 144 * ipow(e, 2) + 27) /
         (18 * ipow(r, 2) * d1);
}

template <typename T>
T s16(T r, T e) {
  const T s3 = sqrt3<T>();
  const T d1 = seg_den(e);
  return (48 * ipow(r, 4) * ipow(e, 4) + 256 * ipow(r, 3) * ipow(e, 4) - 128 * s3 * ipow(r, 3) * ipow(e, 3) +
          288 * ipow(r, 2) * ipow(e, 4) - 192 * s3 * ipow(r, 2) * ipow(e, 3) + 72 * ipow(r, 2) * ipow(e, 2) +
          18 * ipow(r, 2) + 48 * s3 * e - 45) /
         (18 * d1 * ipow(r, 2));
}

template <typename T>
T s23(T r, T e) {
  const T s3 = sqrt3<T>();
  const T d1 = seg_den(e);
  return -(576 * ipow(r, 4) * ipow(e, 4) - 1152 * ipow(r, 2) * ipow(e, 4) + 37 * ipow(r, 4) +
           224 * s3 * ipow(r, 3) * e + 864 * ipow(r, 2) * ipow(e, 2) - 384 * ipow(e, 4) - 336 * ipow(r, 3) -
           576 * s3 * ipow(r, 2) * e + 768 * s3 * ipow(e, 3) + 432 * ipow(r, 2) - 1728 * ipow(e, 2) +
           576 * s3 * e - 216) /
         (216 * ipow(r, 2) * d1);
}

template <typename T>
T s33(T r, T e) {
  const T s3 = sqrt3<T>();
  const T d1 = seg_den(e);
  return (576 * ipow(r, 2) * ipow(e, 4) + 3072 * r * ipow(e, 4) - 1536 * s3 * r * ipow(e, 3) +
          3456 * ipow(e, 4) - 2304 * s3 * ipow(e, 3) - 37 * ipow(r, 2) - 224 * s3 * r * e + 864 * ipow(e, 2) +
          336 * r + 576 * s3 * e - 432) /
         (216 * d1);
}

template <typename T>
T s34(T r, T e) {
  const T s3 = sqrt3<T>();
  const T d1 = seg_den(e);
  return (192 * ipow(r, 4) * ipow(e, 4) + 1024 * ipow(r, 3) * ipow(e, 4) -
          512 * s3 * ipow(r, 3) * ipow(e, 3) + 1152 * ipow(r, 2) * ipow(e, 4) -
          768 * s3 * ipow(r, 2) * ipow(e, 3) + 9 * ipow(r, 4) + 96 * s3 * ipow(r, 3) * e +
          288 * ipow(r, 2) * ipow(e, 2) - 144 * ipow(r, 3) - 576 * s3 * ipow(r, 2) * e + 720 * ipow(r, 2) +
          1152 * s3 * r * e - 1152 * r - 576 * s3 * e + 540) /
         (72 * ipow(r, 2) * d1);
}

template <typename T>
T s41(T r, T e) {
  const T s3 = sqrt3<T>();

  return -(9 * ipow(r, 2) * ipow(e, 2) + 2 * s3 * ipow(r, 2) * e + 48 * r * ipow(e, 2) + ipow(r, 2) -
           16 * s3 * r * e - 90 * ipow(e, 2) - 12 * r + 36 * s3 * e) /
         (18 * ipow((3 * e - s3), 2));
}

template <typename T>
T s42(T r, T e) {
  const T s3 = sqrt3<T>();

  return -(9 * ipow(r, 4) * ipow(e, 4) - 4 * s3 * ipow(r, 4) * ipow(e, 3) + 48 * ipow(r, 3) * ipow(e, 4) -
           48 * s3 * ipow(r, 3) * ipow(e, 3) - 90 * ipow(r, 2) * ipow(e, 4) + 36 * ipow(r, 3) * ipow(e, 2) +
           96 * s3 * ipow(r, 2) * ipow(e, 3) - 126 * ipow(r, 2) * ipow(e, 2) - 32 * s3 * r * ipow(e, 3) -
           48 * ipow(e, 4) + 36 * s3 * ipow(r, 2) * e + 144 * r * ipow(e, 2) + 96 * s3 * ipow(e, 3) -
           18 * ipow(r, 2) - 72 * s3 * r * e - 216 * ipow(e, 2) + 36 * r + 72 * s3 * e - 27) /
         (2 * ipow((3 * e - s3), 4) * ipow(r, 2));
}

template <typename T>
T a11(T r, T e) {
  const T s3 = sqrt3<T>();
  const T da = assoc_den(e);
  return -(3456 * ipow(e, 4) * ipow(r, 4) + 9216 * ipow(e, 4) * ipow(r, 3) -
           3072 * s3 * ipow(e, 3) * ipow(r, 4) - 17280 * ipow(e, 4) * ipow(r, 2) -
           3072 * s3 * ipow(e, 3) * ipow(r, 3) + 2304 * ipow(e, 2) * ipow(r, 4) +
           4608 * s3 * ipow(e, 3) * ipow(r, 2) - 2304 * ipow(e, 2) * ipow(r, 3) + 6336 * ipow(e, 4) +
           6144 * s3 * ipow(e, 3) * r + 6912 * ipow(e, 2) * ipow(r, 2) + 512 * s3 * e * ipow(r, 3) -
           101 * ipow(r, 4) - 6144 * s3 * ipow(e, 3) - 11520 * ipow(e, 2) * r - 1536 * s3 * e * ipow(r, 2) +
           256 * ipow(r, 3) + 5760 * ipow(e, 2) + 1536 * s3 * e * r - 384 * ipow(r, 2) - 512 * s3 * e +
           256 * r - 64) /
         (24 * da * ipow(r, 2));
}

template <typename T>
T a12(T r, T e) {
  const T s3 = sqrt3<T>();
  const T da = assoc_den(e);
  return -(1728 * ipow(e, 4) * ipow(r, 4) - 1536 * s3 * ipow(e, 3) * ipow(r, 4) -
           31104 * ipow(e, 4) * ipow(r, 2) + 1152 * ipow(e, 2) * ipow(r, 4) + 15552 * ipow(e, 4) +
           10368 * ipow(e, 2) * ipow(r, 2) - 37 * ipow(r, 4) - 20736 * ipow(e, 2) * r + 10368 * ipow(e, 2)) /
         (24 * da * ipow(r, 2));
}

// Sign conventions chosen so the piece is continuous with its neighbours at both ends.
template <typename T>
T a13(T r, T e) {
  const T s3 = sqrt3<T>();
  const T da = assoc_den(e);
  return -(2592 * ipow(e, 4) * ipow(r, 4) - 2304 * s3 * ipow(e, 3) * ipow(r, 4) -
           46656 * ipow(e, 4) * ipow(r, 2) + 1728 * ipow(e, 2) * ipow(r, 4) + 10656 * ipow(e, 4) -
           9216 * s3 * ipow(e, 3) * r + 9072 * ipow(e, 2) * ipow(r, 2) - 432 * s3 * e * ipow(r, 3) -
           15 * ipow(r, 4) + 12288 * s3 * ipow(e, 3) - 13824 * ipow(e, 2) * r + 1728 * s3 * e * ipow(r, 2) -
           216 * ipow(r, 3) + 4032 * ipow(e, 2) - 2304 * s3 * e * r + 432 * ipow(r, 2) + 1024 * s3 * e -
           384 * r + 128) /
         (36 * da * ipow(r, 2));
}

template <typename T>
T a14(T r, T e) {
  const T s3 = sqrt3<T>();
  const T da = assoc_den(e);
  return -(1728 * ipow(e, 4) * ipow(r, 4) - 1536 * s3 * ipow(e, 3) * ipow(r, 4) -
           31104 * ipow(e, 4) * ipow(r, 2) + 1152 * ipow(e, 2) * ipow(r, 4) - 5184 * ipow(e, 4) +
           2592 * ipow(e, 2) * ipow(r, 2) - 37 * ipow(r, 4) - 3456 * ipow(e, 2)) /
         (24 * da * ipow(r, 2));
}

template <typename T>
T a15(T r, T e) {
  const T da = assoc_den(e);
  return 9 *
         (1152 * ipow(e, 4) * ipow(r, 2) + 192 * ipow(e, 4) - 192 * ipow(e, 2) * ipow(r, 2) - ipow(r, 4) +
          128 * ipow(e, 2) + 32 * ipow(r, 2) - 64 * r + 36) /
         (8 * da * ipow(r, 2));
}

template <typename T>
T a16(T r, T e) {
  const T da = assoc_den(e);
  return -9 * (r + 6) * ipow((r - 2), 3) / (8 * da * ipow(r, 2));
}

template <typename T>
T a22(T r, T e) {
  const T s3 = sqrt3<T>();
  const T da = assoc_den(e);
  return (-3456 * ipow(e, 2) * ipow(r, 4) + 111 * ipow(r, 4) - 5184 * ipow(e, 4) * ipow(r, 4) +
          4608 * s3 * ipow(e, 3) * ipow(r, 4) - 336 * s3 * e * ipow(r, 3) - 168 * ipow(r, 3) -
          13824 * ipow(e, 4) * ipow(r, 3) + 4608 * s3 * ipow(e, 3) * ipow(r, 3) +
          3456 * ipow(e, 2) * ipow(r, 3) + 144 * ipow(r, 2) - 6912 * s3 * ipow(e, 3) * ipow(r, 2) -
          3888 * ipow(e, 2) * ipow(r, 2) + 576 * s3 * e * ipow(r, 2) + 25920 * ipow(e, 4) * ipow(r, 2) +
          3168 * ipow(e, 4) + 2880 * ipow(e, 2) - 256 * s3 * e - 32 - 3072 * s3 * ipow(e, 3)) /
         (36 * da * ipow(r, 2));
}

template <typename T>
T a31(T r, T /*e*/) {
  return (2 * ipow(r, 2) - 1) / (6 * ipow(r, 2));
}

template <typename T>
T a32(T r, T e) {
  const T s3 = sqrt3<T>();

  return (432 * ipow(e, 4) * ipow(r, 4) + 1152 * ipow(e, 4) * ipow(r, 3) -
          576 * s3 * ipow(e, 3) * ipow(r, 4) + 1296 * ipow(e, 4) * ipow(r, 2) -
          960 * s3 * ipow(e, 3) * ipow(r, 3) + 864 * ipow(e, 2) * ipow(r, 4) -
          864 * s3 * ipow(e, 3) * ipow(r, 2) + 576 * ipow(e, 2) * ipow(r, 3) - 192 * s3 * e * ipow(r, 4) -
          360 * ipow(e, 4) + 648 * ipow(e, 2) * ipow(r, 2) + 64 * s3 * e * ipow(r, 3) + 48 * ipow(r, 4) +
          192 * s3 * ipow(e, 3) - 144 * s3 * e * ipow(r, 2) - 64 * ipow(r, 3) - 504 * ipow(e, 2) +
          72 * ipow(r, 2) + 88 * s3 * e - 25) /
         (16 * ipow((3 * e - s3), 4) * ipow(r, 2));
}

template <typename T>
T a33(T r, T e) {
  const T s3 = sqrt3<T>();

  return -(-54 * ipow(e, 2) * ipow(r, 2) + 36 * s3 * e * ipow(r, 2) + 15 * ipow(e, 2) - 18 * ipow(r, 2) +
           2 * s3 * e + 20) /
         (6 * ipow((-3 * e + s3), 2) * ipow(r, 2));
}

// a16 is a correction term: the mean on [2, inf) is a15 - a16.
template <typename T>
T assoc_tail(T r, T e) {
  return a15(r, e) - a16(r, e);
}

// Needed for eps in [sqrt3/6, sqrt3/5) where sqrt3/(2 eps) - 1 exceeds 3/2: on
// [3/2, sqrt3/(2 eps) - 1) both geometric transitions have happened independently.
template <typename T>
T s3x(T r, T e) {
  return s23(r, e) + s34(r, e) - s33(r, e);
}

enum class SegPiece { s11, s12, s13, s14, s15, s16, s23, s33, s34, s3x, s41, s42, one };
enum class AssocPiece { a11, a12, a13, a14, a15, tail, a22, a31, a32, a33 };

// Piece governing mu_S at (r, e); half-open intervals, right piece at a breakpoint.
inline SegPiece seg_piece(double r, double e) {
  const double s3 = kSqrt3;
  if (e < s3 / 8) {
    if (r >= s3 / (2 * e)) return SegPiece::one;
    if (r >= s3 / (2 * e) - 1) return SegPiece::s16;
    if (r >= 2) return SegPiece::s15;
    if (r >= 2 - 4 * e / s3) return SegPiece::s14;
    if (r >= 1.5) return SegPiece::s13;
    if (r >= 1.5 - s3 * e) return SegPiece::s12;
    return SegPiece::s11;
  }
  if (e < s3 / 6) {
    if (r >= s3 / (2 * e)) return SegPiece::one;
    if (r >= s3 / (2 * e) - 1) return SegPiece::s16;
    if (r >= 2) return SegPiece::s15;
    if (r >= 1.5) return SegPiece::s14;
    if (r >= 2 - 4 * e / s3) return SegPiece::s23;
    if (r >= 1.5 - s3 * e) return SegPiece::s12;
    return SegPiece::s11;
  }
  if (e < s3 / 4) {
    const double b1 = 2 - 4 * e / s3;
    const double b2 = s3 / (2 * e) - 1;
    if (r >= s3 / (2 * e)) return SegPiece::one;
    if (r >= 2) return SegPiece::s16;
    if (b2 <= 1.5) {
      if (r >= 1.5) return SegPiece::s34;
      if (r >= b2) return SegPiece::s33;
    } else {
      if (r >= b2) return SegPiece::s34;
      if (r >= 1.5) return SegPiece::s3x;
    }
    if (r >= b1) return SegPiece::s23;
    return SegPiece::s12;
  }
  if (r >= s3 / e - 2) return SegPiece::one;
  // s41 and s42 meet at 3 - 2 sqrt3 eps.
  if (r >= 3 - 2 * s3 * e) return SegPiece::s42;
  return SegPiece::s41;
}

inline AssocPiece assoc_piece(double r, double e) {
  const double q = kSqrt3 * e;
  if (e < kSqrt3 / 12) {
    if (r >= 2) return AssocPiece::tail;
    if (r >= 3 / (2 * (1 - q))) return AssocPiece::a15;
    if (r >= 4 * (1 + 2 * q) / 3) return AssocPiece::a14;
    const double ea = (7 * kSqrt3 - 3 * std::sqrt(15.0)) / 12;
    if (e < ea) {
      if (r >= 4 * (1 - q) / 3) return AssocPiece::a13;
      if (r >= (1 + 2 * q) / (1 - q)) return AssocPiece::a12;
    } else {
      if (r >= (1 + 2 * q) / (1 - q)) return AssocPiece::a13;
      if (r >= 4 * (1 - q) / 3) return AssocPiece::a22;
    }
    return AssocPiece::a11;
  }
  if (r >= 3 / (2 * (1 - q))) return AssocPiece::a33;
  if (r >= (1 + 2 * q) / (2 * (1 - q))) return AssocPiece::a32;
  return AssocPiece::a31;
}

template <typename T>
T seg_value(SegPiece p, T r, T e) {
  switch (p) {
    case SegPiece::s11:
      return s11(r, e);
    case SegPiece::s12:
      return s12(r, e);
    case SegPiece::s13:
      return s13(r, e);
    case SegPiece::s14:
      return s14(r, e);
    case SegPiece::s15:
      return s15(r, e);
    case SegPiece::s16:
      return s16(r, e);
    case SegPiece::s23:
      return s23(r, e);
    case SegPiece::s33:
      return s33(r, e);
    case SegPiece::s34:
      return s34(r, e);
    case SegPiece::s3x:
      return s3x(r, e);
    case SegPiece::s41:
      return s41(r, e);
    case SegPiece::s42:
      return s42(r, e);
    case SegPiece::one:
      return T(1);
  }
  return T(1);
}

template <typename T>
T assoc_value(AssocPiece p, T r, T e) {
  switch (p) {
    case AssocPiece::a11:
      return a11(r, e);
    case AssocPiece::a12:
      return a12(r, e);
    case AssocPiece::a13:
      return a13(r, e);
    case AssocPiece::a14:
      return a14(r, e);
    case AssocPiece::a15:
      return a15(r, e);
    case AssocPiece::tail:
      return assoc_tail(r, e);
    case AssocPiece::a22:
      return a22(r, e);
    case AssocPiece::a31:
      return a31(r, e);
    case AssocPiece::a32:
      return a32(r, e);
    case AssocPiece::a33:
      return a33(r, e);
  }
  return T(0);
}

}  // namespace detail

inline double mu_segregation(RFactor r, double eps) {
  validate_eps(eps, true);
  if (eps == 0.0) return mu_null(r);
  if (r.is_infinite()) return 1.0;
  return detail::seg_value(detail::seg_piece(r.value(), eps), r.value(), eps);
}

inline double mu_association(RFactor r, double eps) {
  validate_eps(eps, true);
  if (eps == 0.0) return mu_null(r);
  if (r.is_infinite()) return 1.0;
  return detail::assoc_value(detail::assoc_piece(r.value(), eps), r.value(), eps);
}

inline double mu_alternative(RFactor r, const AltSpec& spec) {
  return spec.kind == AltKind::segregation ? mu_segregation(r, spec.eps) : mu_association(r, spec.eps);
}

// Smallest r at which the segregation digraph is complete almost surely.
inline double r_degenerate(double eps) {
  validate_eps(eps);
  return eps <= kSqrt3 / 4 ? kSqrt3 / (2 * eps) : kSqrt3 / eps - 2;
}

inline bool alt_nondegenerate(RFactor r, const AltSpec& spec) {
  validate(spec);
  if (spec.kind == AltKind::segregation) return !r.is_infinite() && r.value() < r_degenerate(spec.eps);
  if (r.is_infinite()) return false;
  return r.value() > 1.0 || spec.eps < kSqrt3 / 12;
}

// Asymptotic variance under segregation with eps = sqrt3/4. No valid closed form is
// known on [3/2, 2); that range throws ClosedFormUnavailable.
inline double nu_segregation_s34(RFactor rf) {
  using detail::ipow;
  if (rf.is_infinite() || rf.value() >= 2.0) return 0.0;
  const double r = rf.value();
  if (r < 9.0 / 8.0)
    return -(14285 * ipow(r, 7) - 28224 * ipow(r, 6) - 233266 * ipow(r, 5) + 1106688 * ipow(r, 4) -
             2021199 * ipow(r, 3) + 1876608 * ipow(r, 2) - 880794 * r + 165888) /
           (3645 * r);
  if (r < 9.0 / 7.0)
    return -(14285 * ipow(r, 10) - 28224 * ipow(r, 9) - 233266 * ipow(r, 8) + 1106688 * ipow(r, 7) -
             1234767 * ipow(r, 6) - 3431808 * ipow(r, 5) + 14049126 * ipow(r, 4) - 22228992 * ipow(r, 3) +
             18895680 * ipow(r, 2) - 8503056 * r + 1594323) /
           (3645 * ipow(r, 4));
  if (r < 4.0 / 3.0)
    return -(14285 * ipow(r, 10) - 28224 * ipow(r, 9) - 233266 * ipow(r, 8) + 1106688 * ipow(r, 7) -
             2545713 * ipow(r, 6) + 5903280 * ipow(r, 5) - 13456044 * ipow(r, 4) + 20636208 * ipow(r, 3) -
             18305190 * ipow(r, 2) + 8503056 * r - 1594323) /
           (3645 * ipow(r, 4));
  if (r < 1.5)
    return (104920 * ipow(r, 8) - 111072 * ipow(r, 7) + 1992132 * ipow(r, 6) - 15844032 * ipow(r, 5) +
            50174640 * ipow(r, 4) + 6377292 - 34012224 * r + 73220760 * ipow(r, 2) - 81881280 * ipow(r, 3) +
            1909 * ipow(r, 10) - 27072 * ipow(r, 9)) /
           (14580 * ipow(r, 4));
  throw ClosedFormUnavailable("no closed-form segregation variance for eps = sqrt3/4 on [3/2, 2), r = " +
                              std::to_string(r));
}

// Asymptotic variance under association with eps = sqrt3/12.
inline double nu_association_s312(RFactor rf) {
  using detail::ipow;
  if (rf.is_infinite()) return 0.0;
  const double r = rf.value();
  if (r < 1.5)
    return (10 * ipow(r, 12) - 96 * ipow(r, 11) + 240 * ipow(r, 10) + 192 * ipow(r, 9) - 1830 * ipow(r, 8) +
            3360 * ipow(r, 7) - 2650 * ipow(r, 6) + 240 * ipow(r, 5) + 1383 * ipow(r, 4) - 1280 * ipow(r, 3) +
            540 * ipow(r, 2) - 144 * r + 35) /
           (405 * ipow(r, 6));
  if (r < 2.0)
    return (10 * ipow(r, 12) - 96 * ipow(r, 11) + 240 * ipow(r, 10) + 192 * ipow(r, 9) - 1670 * ipow(r, 8) +
            2784 * ipow(r, 7) - 2650 * ipow(r, 6) + 2400 * ipow(r, 5) - 1047 * ipow(r, 4) -
            1280 * ipow(r, 3) + 1269 * ipow(r, 2) - 144 * r + 35) /
           (405 * ipow(r, 6));
  return (537 * ipow(r, 4) - 683 * ipow(r, 2) - 2448 * r + 1315) / (405 * ipow(r, 6));
}

}  // namespace pcd
