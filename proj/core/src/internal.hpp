#pragma once

// Shared site-tensor reshaping and canonical-split helpers. Not installed;
// used by mps.cpp and tdvp.cpp only.

#include "tnet/linalg.hpp"
#include "tnet/mps.hpp"

namespace tnet::detail {

// (physical, left, right) -> matrix ((d*Dl) x Dr), row = sigma*Dl + left
inline ComplexMatrix left_matricize(const SiteTensor& t) {
    const auto d = static_cast<Eigen::Index>(t.size());
    const Eigen::Index dl = t[0].rows(), dr = t[0].cols();
    ComplexMatrix m(d * dl, dr);
    for (Eigen::Index s = 0; s < d; ++s) m.middleRows(s * dl, dl) = t[static_cast<size_t>(s)];
    return m;
}

inline SiteTensor left_unmatricize(const ComplexMatrix& m, Eigen::Index d) {
    const Eigen::Index dl = m.rows() / d;
    SiteTensor t(static_cast<size_t>(d));
    for (Eigen::Index s = 0; s < d; ++s) t[static_cast<size_t>(s)] = m.middleRows(s * dl, dl);
    return t;
}

// (physical, left, right) -> matrix (Dl x (d*Dr)), col = sigma*Dr + right
inline ComplexMatrix right_matricize(const SiteTensor& t) {
    const auto d = static_cast<Eigen::Index>(t.size());
    const Eigen::Index dl = t[0].rows(), dr = t[0].cols();
    ComplexMatrix m(dl, d * dr);
    for (Eigen::Index s = 0; s < d; ++s) m.middleCols(s * dr, dr) = t[static_cast<size_t>(s)];
    return m;
}

inline SiteTensor right_unmatricize(const ComplexMatrix& m, Eigen::Index d) {
    const Eigen::Index dr = m.cols() / d;
    SiteTensor t(static_cast<size_t>(d));
    for (Eigen::Index s = 0; s < d; ++s) t[static_cast<size_t>(s)] = m.middleCols(s * dr, dr);
    return t;
}

// QR split keeping the bond dimension: site <- left-isometric Q, returns the
// (Dr x Dr) upper-triangular remainder. Requires d*Dl >= Dr.
inline ComplexMatrix split_left(SiteTensor& t, int site_for_error) {
    const auto d = static_cast<Eigen::Index>(t.size());
    const Eigen::Index dl = t[0].rows(), dr = t[0].cols();
    if (d * dl < dr)
        throw std::invalid_argument(
            "left canonicalization impossible at fixed bond dimension: site " +
            std::to_string(site_for_error) + " has d*Dl = " + std::to_string(d * dl) +
            " < Dr = " + std::to_string(dr));
    QrResult qr = qr_thin(left_matricize(t));
    t = left_unmatricize(qr.q, d);
    return qr.r;
}

// LQ split keeping the bond dimension: site <- right-isometric Q, returns the
// (Dl x Dl) lower-triangular remainder. Requires Dl <= d*Dr.
inline ComplexMatrix split_right(SiteTensor& t, int site_for_error) {
    const auto d = static_cast<Eigen::Index>(t.size());
    const Eigen::Index dl = t[0].rows(), dr = t[0].cols();
    if (dl > d * dr)
        throw std::invalid_argument(
            "right canonicalization impossible at fixed bond dimension: site " +
            std::to_string(site_for_error) + " has Dl = " + std::to_string(dl) +
            " > d*Dr = " + std::to_string(d * dr));
    QrResult qr = qr_thin(right_matricize(t).adjoint());
    t = right_unmatricize(qr.q.adjoint(), d);
    return qr.r.adjoint();
}

}  // namespace tnet::detail
