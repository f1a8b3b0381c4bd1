#include "sklpca/groups.hpp"

#include "sklpca/errors.hpp"

#include <string>

namespace sklpca {

GroupIndex::GroupIndex(std::vector<Segment> segments) : segments_(std::move(segments)) {
    Eigen::Index next = 0;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const Segment& s = segments_[i];
        if (s.start != next || s.count < 1) {
            throw InputError("GroupIndex: segments must be contiguous, ordered and non-empty (subject '" +
                             s.subject_id + "')");
        }
        if (!lookup_.emplace(s.subject_id, static_cast<Eigen::Index>(i)).second) {
            throw InputError("GroupIndex: subject '" + s.subject_id +
                             "' appears in more than one segment");
        }
        next += s.count;
    }
    total_rows_ = next;
}

GroupIndex GroupIndex::from_labels(const std::vector<std::string>& row_labels) {
    std::vector<Segment> segments;
    for (std::size_t r = 0; r < row_labels.size(); ++r) {
        if (segments.empty() || segments.back().subject_id != row_labels[r]) {
            segments.push_back({row_labels[r], static_cast<Eigen::Index>(r), 0});
        }
        ++segments.back().count;
    }
    return GroupIndex(std::move(segments));
}

GroupIndex GroupIndex::uniform(Eigen::Index subjects, Eigen::Index rows_per_subject) {
    std::vector<Segment> segments;
    segments.reserve(static_cast<std::size_t>(subjects));
    for (Eigen::Index i = 0; i < subjects; ++i) {
        segments.push_back({subject_label(i, subjects), i * rows_per_subject, rows_per_subject});
    }
    return GroupIndex(std::move(segments));
}

std::optional<Eigen::Index> GroupIndex::find(const std::string& subject_id) const {
    const auto it = lookup_.find(subject_id);
    if (it == lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Eigen::Index GroupIndex::min_count() const {
    Eigen::Index out = 0;
    for (const Segment& s : segments_) {
        out = (out == 0) ? s.count : std::min(out, s.count);
    }
    return out;
}

void GroupIndex::require_min_count(Eigen::Index min, const char* context) const {
    for (const Segment& s : segments_) {
        if (s.count < min) {
            throw InsufficientDataError(std::string(context) + ": subject '" + s.subject_id + "' has " +
                                        std::to_string(s.count) + " row(s), at least " +
                                        std::to_string(min) + " required");
        }
    }
}

std::vector<std::string> GroupIndex::row_labels() const {
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(total_rows_));
    for (const Segment& s : segments_) {
        out.insert(out.end(), static_cast<std::size_t>(s.count), s.subject_id);
    }
    return out;
}

bool operator==(const GroupIndex& a, const GroupIndex& b) {
    if (a.segments_.size() != b.segments_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.segments_.size(); ++i) {
        const auto& x = a.segments_[i];
        const auto& y = b.segments_[i];
        if (x.subject_id != y.subject_id || x.start != y.start || x.count != y.count) {
            return false;
        }
    }
    return true;
}

std::string subject_label(Eigen::Index index, Eigen::Index subjects) {
    std::size_t width = 1;
    for (Eigen::Index v = std::max<Eigen::Index>(subjects, 1); v >= 10; v /= 10) {
        ++width;
    }
    std::string digits = std::to_string(index + 1);
    if (digits.size() < width) {
        digits.insert(0, width - digits.size(), '0');
    }
    return "s" + digits;
}

} // namespace sklpca
