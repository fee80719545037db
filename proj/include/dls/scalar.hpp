#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <type_traits>

namespace dls {

template <class T>
struct is_complex : std::false_type {};
template <class R>
struct is_complex<std::complex<R>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class T>
struct real_of {
  using type = T;
};
template <class R>
struct real_of<std::complex<R>> {
  using type = R;
};
template <class T>
using real_t = typename real_of<T>::type;

/// The four supported scalar types: {real, complex} x {single, double}.
template <class T>
concept Scalar = std::is_same_v<T, float> || std::is_same_v<T, double> ||
                 std::is_same_v<T, std::complex<float>> ||
                 std::is_same_v<T, std::complex<double>>;

/// Same field as T, double precision.
template <class T>
using promote_t = std::conditional_t<is_complex_v<T>, std::complex<double>, double>;

/// Same field as T, single precision.
template <class T>
using demote_t = std::conditional_t<is_complex_v<T>, std::complex<float>, float>;

template <class T>
constexpr T conj(T x) {
  if constexpr (is_complex_v<T>) {
    return std::conj(x);
  } else {
    return x;
  }
}

template <class T>
constexpr real_t<T> abs2(T x) {
  if constexpr (is_complex_v<T>) {
    return x.real() * x.real() + x.imag() * x.imag();
  } else {
    return x * x;
  }
}

template <class T>
constexpr real_t<T> real_part(T x) {
  if constexpr (is_complex_v<T>) {
    return x.real();
  } else {
    return x;
  }
}

template <class T>
constexpr real_t<T> epsilon() {
  return std::numeric_limits<real_t<T>>::epsilon();
}

/// Converts between scalar types of possibly different field and precision.
/// Complex -> real drops the imaginary part; callers only do that for data
/// known to be real.
template <class To, class From>
constexpr To scalar_cast(From x) {
  if constexpr (is_complex_v<To> && is_complex_v<From>) {
    return To(static_cast<real_t<To>>(x.real()), static_cast<real_t<To>>(x.imag()));
  } else if constexpr (is_complex_v<To>) {
    return To(static_cast<real_t<To>>(x), 0);
  } else if constexpr (is_complex_v<From>) {
    return static_cast<To>(x.real());
  } else {
    return static_cast<To>(x);
  }
}

}  // namespace dls
