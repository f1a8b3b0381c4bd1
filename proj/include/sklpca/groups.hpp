#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sklpca {

/// Contiguous row ranges, one per subject, covering rows [0, n) in order.
/// Stands in for the 0/1 selection matrices: S_i^T K S_j is a block slice.
class GroupIndex {
public:
    struct Segment {
        std::string subject_id;
        Eigen::Index start = 0;
        Eigen::Index count = 0;
    };

    GroupIndex() = default;

    /// Segments must be contiguous, ordered from row 0, non-empty and carry unique ids.
    explicit GroupIndex(std::vector<Segment> segments);

    /// Builds segments from per-row labels; equal labels must be adjacent.
    static GroupIndex from_labels(const std::vector<std::string>& row_labels);

    /// Equal-sized subjects with ids produced by `subject_label`.
    static GroupIndex uniform(Eigen::Index subjects, Eigen::Index rows_per_subject);

    [[nodiscard]] Eigen::Index subjects() const noexcept {
        return static_cast<Eigen::Index>(segments_.size());
    }
    [[nodiscard]] Eigen::Index total_rows() const noexcept { return total_rows_; }
    [[nodiscard]] const Segment& operator[](Eigen::Index i) const {
        return segments_[static_cast<std::size_t>(i)];
    }
    [[nodiscard]] const std::vector<Segment>& segments() const noexcept { return segments_; }
    [[nodiscard]] std::optional<Eigen::Index> find(const std::string& subject_id) const;
    [[nodiscard]] Eigen::Index min_count() const;

    /// Throws InsufficientDataError unless every subject has at least `min` rows.
    void require_min_count(Eigen::Index min, const char* context) const;

    /// Subject id per row.
    [[nodiscard]] std::vector<std::string> row_labels() const;

    friend bool operator==(const GroupIndex& a, const GroupIndex& b);

private:
    std::vector<Segment> segments_;
    std::unordered_map<std::string, Eigen::Index> lookup_;
    Eigen::Index total_rows_ = 0;
};

/// Zero-padded subject label ("s01".."s50") so lexical order equals index order.
[[nodiscard]] std::string subject_label(Eigen::Index index, Eigen::Index subjects);

} // namespace sklpca
